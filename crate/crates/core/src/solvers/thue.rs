//! `x^3 - 2y^3 = m`.
//!
//! Writing `c = 2^(1/3)`, the factorisation `x^3 - 2y^3 = (x - cy)(x^2 + cxy + c^2 y^2)`
//! and `x^2 + cxy + c^2 y^2 >= (3/4) c^2 y^2` give `|x/y - c| <= 4|m| / (3 c^2 |y|^3)`.
//! Once `|y| > 8|m| / (3 c^2)` this is below `1/(2y^2)`, so `x/y` is a convergent
//! of `c`. Small `|y|` are searched directly; large `|y|` are read off the
//! convergents up to the effective height bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use super::exact_cbrt;
use crate::contfrac::Expander;
use crate::error::{Error, Result};
use crate::logforms::{bound_thue_cubic, BoundResult};
use crate::numeric::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThueMethod {
    BruteForce,
    ConvergentCertified,
}

impl ThueMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThueMethod::BruteForce => "bruteforce",
            ThueMethod::ConvergentCertified => "convergent-certified",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ThueSolutionSet {
    pub m: BigInt,
    pub solutions: Vec<(BigInt, BigInt)>,
    pub method: ThueMethod,
    /// Direct search covered `|y| <= y0`.
    pub y0: BigInt,
    /// Convergents of `2^(1/3)` were swept up to denominator `10^q_log10`.
    pub q_log10: u32,
    pub candidates: usize,
    pub height_bound: Option<BoundResult>,
}

impl ThueSolutionSet {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "equation": "x^3 - 2y^3 = m",
            "m": self.m.to_string(),
            "method": self.method.as_str(),
            "solutions": self.solutions.iter().map(|(x, y)| json!([x.to_string(), y.to_string()])).collect::<Vec<_>>(),
            "direct_search_y_max": self.y0.to_string(),
            "convergent_q_max_log10": self.q_log10,
            "convergent_candidates": self.candidates,
            "height_bound": self.height_bound.as_ref().map(|b| b.to_json()),
            "complete": self.method == ThueMethod::ConvergentCertified,
        })
    }
}

/// All solutions with `|y| <= y_max`, sorted.
pub fn thue_brute_force(m: &BigInt, y_max: i64) -> Vec<(BigInt, BigInt)> {
    let mut out: Vec<(BigInt, BigInt)> = (-y_max..=y_max)
        .into_par_iter()
        .filter_map(|y| {
            let y = BigInt::from(y);
            let t = m + BigInt::from(2) * &y * &y * &y;
            exact_cbrt(&t).map(|x| (x, y))
        })
        .collect();
    out.sort();
    out
}

/// Complete solution set of `x^3 - 2y^3 = m`.
pub fn solve_thue_cubic(m: &BigInt) -> Result<ThueSolutionSet> {
    if m.is_zero() {
        return Err(Error::invalid("m must be nonzero"));
    }
    let y0 = (m.abs() * 10u32).max(BigInt::from(1000));
    let y0_i = y0
        .to_i64()
        .filter(|y| *y <= 1 << 32)
        .ok_or_else(|| Error::invalid("|m| too large for the direct search range"))?;
    let mut solutions = thue_brute_force(m, y0_i);

    let bound = bound_thue_cubic(m)?;
    let q_log10 = bound
        .log10_bound
        .upper()
        .ceil()
        .to_u32()
        .ok_or_else(|| Error::invalid("height bound out of range"))?;
    let q_max = num_traits::pow(BigInt::from(10), q_log10 as usize);
    let c = Real::int(2).root(3);
    // enough bits for ~q_max^2 accuracy in the expansion
    let ceiling = (q_log10 * 8 + 256).next_power_of_two().max(1 << 12);
    let mut ex = Expander::new(&c, ceiling)?;
    let mut candidates = 0;
    while ex.next_quotient()?.is_some() {
        let (p, q) = ex.convergent().expect("just pushed");
        if q > q_max {
            break;
        }
        candidates += 1;
        let d = &p * &p * &p - BigInt::from(2) * &q * &q * &q;
        if d.is_zero() || !m.is_multiple_of(&d) {
            continue;
        }
        if let Some(g) = exact_cbrt(&(m / &d)) {
            let sol = (&g * &p, &g * &q);
            if !solutions.contains(&sol) {
                solutions.push(sol);
            }
        }
    }
    solutions.sort();
    for (x, y) in &solutions {
        debug_assert_eq!(x * x * x - BigInt::from(2) * y * y * y, *m);
    }
    Ok(ThueSolutionSet {
        m: m.clone(),
        solutions,
        method: ThueMethod::ConvergentCertified,
        y0,
        q_log10,
        candidates,
        height_bound: Some(bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        v.iter().map(|&(x, y)| (BigInt::from(x), BigInt::from(y))).collect()
    }

    #[test]
    fn m_one() {
        let s = solve_thue_cubic(&BigInt::from(1)).unwrap();
        assert_eq!(s.solutions, pairs(&[(-1, -1), (1, 0)]));
    }

    #[test]
    fn m_1621_sweep_size() {
        let s = solve_thue_cubic(&BigInt::from(1621)).unwrap();
        assert_eq!(s.q_log10, 200);
        assert!(s.candidates > 100 && s.candidates < 1000, "{}", s.candidates);
        for (x, y) in &s.solutions {
            assert_eq!(x * x * x - BigInt::from(2) * y * y * y, BigInt::from(1621));
        }
    }

    #[test]
    fn agrees_with_brute_force_small_m() {
        for m in [-7i64, -3, -1, 2, 5, 6, 11, 25] {
            let full = solve_thue_cubic(&BigInt::from(m)).unwrap();
            let bf = thue_brute_force(&BigInt::from(m), 1000);
            let restricted: Vec<_> = full
                .solutions
                .iter()
                .filter(|(_, y)| y.abs() <= BigInt::from(1000))
                .cloned()
                .collect();
            assert_eq!(restricted, bf, "m = {m}");
        }
    }

    #[test]
    fn zero_is_rejected() {
        assert!(solve_thue_cubic(&BigInt::from(0)).is_err());
    }
}
