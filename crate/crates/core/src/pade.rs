//! Hypergeometric Padé approximants to `(1 - x)^(1/3)`, the rational
//! approximations to `2^(1/3)` they produce, and checks of effective
//! irrationality measures `|alpha - p/q| > c / q^kappa` on convergents.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::contfrac::Expander;
use crate::error::{Error, Result};
use crate::numeric::{certified_sign, compare, Real, Verdict};

type Poly = Vec<BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `B_r(x)` and `A_r(x)` (coefficients lowest degree first) with
/// `A_r(x) - (1 - x)^(1/3) B_r(x) = O(x^(2r+1))` and `B_r(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadePair {
    pub r: usize,
    pub b: Poly,
    pub a: Poly,
}

impl PadePair {
    pub fn to_json(&self) -> serde_json::Value {
        let p = |v: &Poly| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        json!({ "r": self.r, "B": p(&self.b), "A": p(&self.a) })
    }
}

/// Taylor coefficients of `(1 - x)^(1/3)` up to `x^(n-1)`.
pub fn cube_root_series(n: usize) -> Poly {
    let mut out = Vec::with_capacity(n);
    let mut c = BigRational::one();
    for k in 0..n {
        out.push(c.clone());
        // binom(1/3, k+1) (-1)^(k+1) = binom(1/3, k) (-1)^k (k - 1/3) / (k + 1)
        c = c * (BigRational::from_integer(k.into()) - rat(1, 3)) / BigRational::from_integer((k + 1).into());
    }
    out
}

fn mul_trunc(a: &Poly, b: &Poly, n: usize) -> Poly {
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `b_{rj} = prod_{k<j} (1/3 - r + k)(-r + k) / ((1 + k)(-2r + k))`.
pub fn b_coefficients(r: usize) -> Poly {
    let r_ = r as i64;
    let mut out = vec![BigRational::one()];
    let mut acc = BigRational::one();
    for k in 0..r as i64 {
        let num = (rat(1, 3) - rat(r_, 1) + rat(k, 1)) * rat(k - r_, 1);
        let den = rat((1 + k) * (k - 2 * r_), 1);
        acc = acc * num / den;
        out.push(acc.clone());
    }
    out
}

/// Closed-form `B_r`, with `A_r` the truncation of `B_r(x) (1 - x)^(1/3)` to degree `r`.
pub fn pade_coefficients(r: usize) -> PadePair {
    let b = b_coefficients(r);
    let s = cube_root_series(r + 1);
    let a = mul_trunc(&b, &s, r + 1);
    PadePair { r, b, a }
}

/// The same pair from the linear conditions on `B`, solved by Gaussian elimination.
pub fn pade_by_linear_algebra(r: usize) -> Result<PadePair> {
    let s = cube_root_series(2 * r + 1);
    // rows n = r+1 ..= 2r: sum_{j=1..r} b_j s_{n-j} = -s_n
    let mut m: Vec<Vec<BigRational>> = (r + 1..=2 * r)
        .map(|n| {
            let mut row: Vec<BigRational> = (1..=r).map(|j| s[n - j].clone()).collect();
            row.push(-s[n].clone());
            row
        })
        .collect();
    for col in 0..r {
        let piv = (col..r)
            .find(|&i| !m[i][col].is_zero())
            .ok_or_else(|| Error::Verification(format!("singular Padé system at r = {r}")))?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &p;
        }
        for i in 0..r {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[col].clone();
                for (v, pv) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *v -= &f * pv;
                }
            }
        }
    }
    let mut b = vec![BigRational::one()];
    b.extend(m.iter().map(|row| row[r].clone()));
    let a = mul_trunc(&b, &s, r + 1);
    Ok(PadePair { r, b, a })
}

/// Coefficients of `A - (1 - x)^(1/3) B` up to `x^(n-1)`.
pub fn defect_series(pair: &PadePair, n: usize) -> Poly {
    let s = cube_root_series(n);
    let sb = mul_trunc(&pair.b, &s, n);
    (0..n)
        .map(|i| pair.a.get(i).cloned().unwrap_or_default() - &sb[i])
        .collect()
}

fn eval(p: &Poly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// `w_r = (5/4) B_r(3/128) / A_r(3/128)` for `r = 0..count`, using `2 = (5/4)^3 / (1 - 3/128)`.
pub fn approximants_to_cube_root2(count: usize) -> Result<Vec<BigRational>> {
    if count < 1 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let x = rat(3, 128);
    Ok((0..count)
        .map(|r| {
            let p = pade_coefficients(r);
            rat(5, 4) * eval(&p.b, &x) / eval(&p.a, &x)
        })
        .collect())
}

/// 3-adic valuation of each term `b_{rj} x^j` of `B_r(x)`.
pub fn three_adic_profile(r: usize, x: &BigRational) -> Vec<i64> {
    let mut xp = BigRational::one();
    b_coefficients(r)
        .iter()
        .map(|b| {
            let t = b * &xp;
            xp *= x;
            if t.is_zero() {
                i64::MAX
            } else {
                three_adic_valuation(t.numer()) as i64 - three_adic_valuation(t.denom()) as i64
            }
        })
        .collect()
}

/// Outcome of checking `|alpha - p/q| > c q^-kappa` on convergents.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub verdict: Verdict,
    /// Convergent with the least `log(|alpha - p/q| q^kappa / c)`.
    pub worst: Option<(BigInt, BigInt, f64)>,
    /// First convergent where the inequality fails.
    pub violation: Option<(BigInt, BigInt)>,
    pub convergents_checked: usize,
    /// Whether convergents alone decide the question (`c <= 1/2` and `kappa >= 2`).
    pub convergents_suffice: bool,
}

impl MeasureReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "verdict": self.verdict.as_str(),
            "convergents_checked": self.convergents_checked,
            "convergents_suffice": self.convergents_suffice,
            "worst": self.worst.as_ref().map(|(p, q, s)| json!({"p": p.to_string(), "q": q.to_string(), "log_slack": format!("{s:.6}")})),
            "violation": self.violation.as_ref().map(|(p, q)| json!({"p": p.to_string(), "q": q.to_string()})),
        })
    }
}

/// Checks the measure on every convergent with `q <= q_max`. A fraction that is
/// not a convergent has `|alpha - p/q| >= 1/(2q^2)`, so when `c <= 1/2` and
/// `kappa >= 2` the convergents are the only possible violations.
pub fn verify_effective_measure(
    alpha: &Real,
    c: &BigRational,
    kappa: &BigRational,
    q_max: &BigInt,
    ceiling: u32,
) -> Result<MeasureReport> {
    if q_max < &BigInt::one() {
        return Err(Error::invalid("qmax must be at least 1"));
    }
    if !c.is_positive() {
        return Err(Error::invalid("c must be positive"));
    }
    let convergents_suffice = c <= &rat(1, 2) && kappa >= &rat(2, 1);
    let mut ex = Expander::new(alpha, ceiling)?;
    let mut worst: Option<(BigInt, BigInt, f64)> = None;
    let mut violation = None;
    let mut unknown = None;
    let mut checked = 0;
    let ln_c = Real::rational(c.clone()).ln();
    while ex.next_quotient()?.is_some() {
        let (p, q) = ex.convergent().expect("just pushed");
        if &q > q_max {
            break;
        }
        checked += 1;
        let diff = alpha - Real::rational(BigRational::new(p.clone(), q.clone()));
        let (sign, _) = certified_sign(&diff, ceiling)?;
        let abs = match sign {
            Some(0) => {
                violation.get_or_insert((p.clone(), q.clone()));
                continue;
            }
            Some(s) if s < 0 => -diff,
            Some(_) => diff,
            None => {
                unknown = Some(Verdict::Unknown(crate::numeric::Dyadic::zero()));
                continue;
            }
        };
        // log slack = ln|alpha - p/q| + kappa ln q - ln c
        let slack = abs.ln() + Real::rational(kappa.clone()) * Real::int(q.clone()).ln() - &ln_c;
        let v = compare(&slack, &Real::int(0), ceiling)?;
        let s = slack.certify(ceiling)?.to_f64();
        if worst.as_ref().is_none_or(|w| s < w.2) {
            worst = Some((p.clone(), q.clone(), s));
        }
        match v {
            Verdict::True => {}
            Verdict::False => {
                violation.get_or_insert((p, q));
            }
            u @ Verdict::Unknown(_) => unknown = Some(u),
        }
    }
    let verdict = if violation.is_some() {
        Verdict::False
    } else if let Some(u) = unknown {
        u
    } else if convergents_suffice {
        Verdict::True
    } else {
        Verdict::Unknown(crate::numeric::Dyadic::zero())
    };
    Ok(MeasureReport {
        verdict,
        worst,
        violation,
        convergents_checked: checked,
        convergents_suffice,
    })
}

/// Largest power of 3 dividing `n`.
pub fn three_adic_valuation(n: &BigInt) -> u32 {
    let mut n = n.abs();
    let three = BigInt::from(3);
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(&three) {
        n /= &three;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DEFAULT_CEILING;

    #[test]
    fn small_orders() {
        let p0 = pade_coefficients(0);
        assert_eq!(p0.b, vec![rat(1, 1)]);
        assert_eq!(p0.a, vec![rat(1, 1)]);
        let p1 = pade_coefficients(1);
        assert_eq!(p1.b, vec![rat(1, 1), rat(-1, 3)]);
        let d = defect_series(&pade_coefficients(2), 6);
        assert!(d[..5].iter().all(|c| c.is_zero()));
        assert!(!d[5].is_zero());
    }

    #[test]
    fn defect_order_exact() {
        for r in 0..=20 {
            let p = pade_coefficients(r);
            let d = defect_series(&p, 2 * r + 2);
            assert!(d[..=2 * r].iter().all(|c| c.is_zero()), "r = {r}");
            assert!(!d[2 * r + 1].is_zero(), "r = {r}");
        }
    }

    #[test]
    fn linear_algebra_agrees() {
        for r in 0..=20 {
            assert_eq!(pade_by_linear_algebra(r).unwrap(), pade_coefficients(r), "r = {r}");
        }
    }

    #[test]
    fn approximant_values() {
        let w = approximants_to_cube_root2(5).unwrap();
        let expect = [
            rat(5, 4),
            rat(635, 504),
            rat(96389, 76504),
            rat(15240955, 12096754),
            BigRational::new(26990767415i64.into(), 21422586294i64.into()),
        ];
        assert_eq!(w, expect);
        let err = (Real::int(2).root(3) - Real::rational(w[4].clone())).dist_to_int();
        let tol = Real::rational(BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 19)));
        assert!(compare(&tol, &err, 1024).unwrap().is_true());
    }

    #[test]
    fn errors_decrease() {
        let w = approximants_to_cube_root2(11).unwrap();
        let c = Real::int(2).root(3);
        let errs: Vec<Real> = w
            .iter()
            .map(|x| (&c - Real::rational(x.clone())).dist_to_int())
            .collect();
        for i in 1..errs.len() {
            assert!(compare(&errs[i - 1], &errs[i], 4096).unwrap().is_true(), "r = {i}");
        }
    }

    fn v3_binom(n: u64, k: u64) -> i64 {
        let f = |m: u64| {
            (1..=m)
                .map(|i| three_adic_valuation(&BigInt::from(i)) as i64)
                .sum::<i64>()
        };
        f(n) - f(k) - f(n - k)
    }

    #[test]
    fn three_powers_cancel_at_three_over_128() {
        // b_{rj} = 3^-j prod(1 - 3r + 3k) binom(r,j) / (j! binom(2r,j)); x = 3/128 removes the 3^-j
        for r in 0..=20u64 {
            let prof = three_adic_profile(r as usize, &rat(3, 128));
            let worse = three_adic_profile(r as usize, &rat(47, 250047));
            for j in 0..=r {
                let jf: i64 = (1..=j).map(|i| three_adic_valuation(&BigInt::from(i)) as i64).sum();
                let rest = v3_binom(r, j) - jf - v3_binom(2 * r, j);
                assert_eq!(prof[j as usize], rest, "r = {r}, j = {j}");
                // starting from 63/50 instead leaves 3^(-7j)
                assert_eq!(worse[j as usize], rest - 7 * j as i64, "r = {r}, j = {j}");
            }
        }
    }

    #[test]
    fn measure_for_cube_root_of_two() {
        let alpha = Real::int(2).root(3);
        let q = BigInt::from(1_000_000);
        let ok = verify_effective_measure(&alpha, &rat(1, 1_000_000), &rat(591, 200), &q, DEFAULT_CEILING).unwrap();
        assert_eq!(ok.verdict, Verdict::True);
        assert!(ok.worst.is_some());
        let bad = verify_effective_measure(&alpha, &rat(1, 1), &rat(2, 1), &q, DEFAULT_CEILING).unwrap();
        assert_eq!(bad.verdict, Verdict::False);
        assert!(bad.violation.is_some());
    }

    #[test]
    fn measure_for_cube_root_of_five() {
        let alpha = Real::int(5).root(3);
        let c = BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 12900));
        let kappa = BigRational::new(29_999_999_999_998i64.into(), 10_000_000_000_000i64.into());
        let rep = verify_effective_measure(&alpha, &c, &kappa, &BigInt::from(1_000_000), DEFAULT_CEILING).unwrap();
        assert_eq!(rep.verdict, Verdict::True);
    }

    #[test]
    fn best_approximation_sample() {
        use rand::{Rng, SeedableRng};
        let alpha = Real::int(2).root(3);
        let conv = crate::contfrac::convergents_below(&alpha, &BigInt::from(10_000), DEFAULT_CEILING).unwrap();
        let qs: Vec<BigInt> = conv.iter().map(|c| c.1.clone()).collect();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let q = BigInt::from(rng.gen_range(1..=10_000u32));
            if qs.contains(&q) {
                continue;
            }
            let qi = qs.iter().filter(|x| **x <= q).max().unwrap().clone();
            let a = (Real::int(q) * &alpha).dist_to_int();
            let b = (Real::int(qi) * &alpha).dist_to_int();
            assert!(compare(&b, &a, 1024).unwrap().is_false());
        }
    }
}
