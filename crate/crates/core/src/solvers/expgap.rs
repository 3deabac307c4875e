//! `a^r - b^s = m` with `r, s >= 1`.
//!
//! With `Lambda = r log a - s log b = log(1 + m/b^s)` and `b^s >= 2|m|`:
//! `|Lambda| <= 2|m| b^-s`, and `a^r <= (3/2) b^s` gives `|Lambda| <= 3|m| a^-r`,
//! so `|Lambda| <= 3|m| 2^-H` with `H = max(r, s)`. Beyond
//! `H0 = ln(3|m|) / (ln 2 - 1/2)` this is below `exp(-H/2)`, and the two-term
//! linear-form bound caps `H`. Dividing by `log b` gives the homogeneous
//! problem `|r theta - s| < (3|m|/log b) 2^-r`, which the best-approximation
//! step of [`crate::reduction`] collapses to a searchable range.
//! The few `s` with `b^s < 2|m|` are tested one by one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::logforms::{bound_lf4, BoundRequest, BoundResult};
use crate::numeric::Real;
use crate::reduction::{pow10_ceil, reduce_to_fixpoint, KPolicy, ReductionChain, ReductionProblem};

const CEILING: u32 = 1 << 14;

/// `a^i = b^j` for some `i, j >= 1`.
pub fn multiplicatively_dependent(a: &BigInt, b: &BigInt) -> bool {
    let (mut x, mut y) = (a.abs(), b.abs());
    if x <= BigInt::one() || y <= BigInt::one() {
        return true;
    }
    loop {
        if x == y {
            return true;
        }
        if x < y {
            std::mem::swap(&mut x, &mut y);
        }
        if !x.is_multiple_of(&y) {
            return false;
        }
        x /= &y;
        if x.is_one() {
            return true;
        }
    }
}

/// `Some(e)` with `base^e = n`, `e >= 1`.
fn exact_log(n: &BigInt, base: &BigInt) -> Option<u64> {
    if n <= &BigInt::one() {
        return None;
    }
    let mut t = n.clone();
    let mut e = 0;
    while t.is_multiple_of(base) {
        t /= base;
        e += 1;
    }
    t.is_one().then_some(e)
}

#[derive(Clone, Debug)]
pub struct ExpGapReport {
    pub a: BigInt,
    pub b: BigInt,
    pub m: BigInt,
    pub solutions: Vec<(u64, u64)>,
    /// Below this `H` the small-form inequality is not strong enough and the range is searched.
    pub h0: u64,
    pub initial_bound: BoundResult,
    pub chain: ReductionChain,
    /// All `r <= search_r` were tested.
    pub search_r: u64,
    /// All `s` with `b^s < 2|m|` were tested.
    pub small_s: u64,
}

impl ExpGapReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "equation": "a^r - b^s = m",
            "a": self.a.to_string(),
            "b": self.b.to_string(),
            "m": self.m.to_string(),
            "solutions": self.solutions.iter().map(|(r, s)| json!([r, s])).collect::<Vec<_>>(),
            "h0": self.h0,
            "initial_bound": self.initial_bound.to_json(),
            "reduction": self.chain.to_json(),
            "searched_r_up_to": self.search_r,
            "searched_small_s_up_to": self.small_s,
            "complete": true,
        })
    }
}

pub fn solve_exponential_gap(a: &BigInt, b: &BigInt, m: &BigInt) -> Result<ExpGapReport> {
    let two = BigInt::from(2);
    if a < &two || b < &two {
        return Err(Error::invalid("a and b must be at least 2"));
    }
    if m.is_zero() {
        return Err(Error::invalid("m must be nonzero"));
    }
    if multiplicatively_dependent(a, b) {
        return Err(Error::MultiplicativelyDependent {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    let m_abs = m.abs();
    let three_m = Real::int(&m_abs * 3u32);
    let h0_real = three_m.ln() / (Real::int(2).ln() - Real::ratio(1, 2));
    let h0 = h0_real
        .certify(CEILING)?
        .upper()
        .ceil()
        .to_u64()
        .ok_or_else(|| Error::invalid("|m| too large"))?;

    let lf = BoundRequest::new(2, 4, BigRational::new(1.into(), 2.into()), Real::int(a.max(b).clone()));
    let initial_bound = bound_lf4(&lf)?;
    let log10_r = BigRational::from_integer(initial_bound.log10_bound.upper().ceil());

    let (theta, mult) = {
        let lb = Real::int(b.clone()).ln();
        let theta = Real::int(a.clone()).ln() / &lb;
        let mult = (three_m / lb).certify(CEILING)?;
        let (n, d) = mult.upper().to_ratio();
        let mult = BigRational::new(n, d).max(BigRational::one());
        (theta, mult)
    };
    let prob = ReductionProblem::new(
        theta,
        Real::int(0),
        mult,
        BigRational::from_integer(two.clone()),
        pow10_ceil(&log10_r)?,
    )?;
    let chain = reduce_to_fixpoint(&prob, &KPolicy::default())?;
    let search_r = chain
        .final_bound
        .to_u64()
        .ok_or_else(|| Error::Stalled("reduced bound is still too large to search".into()))?
        .max(h0);

    let mut solutions = Vec::new();
    let mut ar = BigInt::one();
    for r in 1..=search_r {
        ar *= a;
        if let Some(s) = exact_log(&(&ar - m), b) {
            solutions.push((r, s));
        }
    }
    let mut small_s = 0;
    let mut bs = b.clone();
    let mut s = 1;
    while bs < &m_abs * &two {
        small_s = s;
        if let Some(r) = exact_log(&(&bs + m), a) {
            solutions.push((r, s));
        }
        bs *= b;
        s += 1;
    }
    solutions.sort();
    solutions.dedup();
    Ok(ExpGapReport {
        a: a.clone(),
        b: b.clone(),
        m: m.clone(),
        solutions,
        h0,
        initial_bound,
        chain,
        search_r,
        small_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(a: u32, b: u32, m: i64, max: u32) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let bpow: Vec<BigInt> = (0..=max).map(|s| num_traits::pow(b.clone(), s as usize)).collect();
        let mut ar = BigInt::one();
        for r in 1..=max {
            ar *= &a;
            let t = &ar - m;
            if let Ok(i) = bpow.binary_search(&t) {
                if i >= 1 {
                    out.push((r as u64, i as u64));
                }
            }
        }
        out
    }

    #[test]
    fn three_two_one() {
        let r = solve_exponential_gap(&3.into(), &2.into(), &1.into()).unwrap();
        assert_eq!(r.solutions, vec![(1, 1), (2, 3)]);
        assert!(!r.chain.certificates.is_empty());
        for c in &r.chain.certificates {
            c.verify(1 << 14).unwrap();
        }
        let v = r.initial_bound.value_f64();
        assert!((131.0..132.0).contains(&v), "{v}");
    }

    #[test]
    fn agrees_with_oracle() {
        for (a, b, m) in [
            (3, 2, 1621),
            (3, 2, -1),
            (2, 3, 5),
            (5, 2, 3),
            (2, 5, -1),
            (7, 3, 4),
            (3, 2, -5),
        ] {
            let r = solve_exponential_gap(&a.into(), &b.into(), &m.into()).unwrap();
            assert_eq!(r.solutions, oracle(a, b, m, 300), "{a}^r - {b}^s = {m}");
        }
    }

    #[test]
    fn dependence() {
        assert!(multiplicatively_dependent(&2.into(), &2.into()));
        assert!(multiplicatively_dependent(&8.into(), &32.into()));
        assert!(!multiplicatively_dependent(&6.into(), &2.into()));
        assert!(!multiplicatively_dependent(&12.into(), &18.into()));
        assert!(matches!(
            solve_exponential_gap(&2.into(), &2.into(), &1.into()),
            Err(Error::MultiplicativelyDependent { .. })
        ));
    }
}
