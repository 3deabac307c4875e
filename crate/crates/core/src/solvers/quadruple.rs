//! Which `N` make `{1, 3, 8, N}` a set where every pairwise product plus one is a square?
//!
//! `N + 1 = x^2`, `3N + 1 = y^2`, `8N + 1 = z^2` give `y^2 - 3x^2 = -2` and
//! `z^2 - 8x^2 = -7`. The first has a single class of solutions,
//! `y + x sqrt3 = (1 + sqrt3)(2 + sqrt3)^r`, the second two:
//! `z + x sqrt8 = (e + sqrt8)(3 + sqrt8)^s` with `e = +-1`. Equating the two
//! expressions for `x` leads to the linear form
//! `Lambda = r log(2 + sqrt3) - s log(3 + sqrt8) - log(alpha3)` with
//! `alpha3 = sqrt3 (e + sqrt8) / (sqrt8 (1 + sqrt3))`, and `|Lambda| < 13^-r`
//! for `r >= 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use super::exact_sqrt;
use super::quadfield::Q23;
use crate::error::{Error, Result};
use crate::logforms::{bound_lf4, BoundRequest, BoundResult};
use crate::numeric::{compare, Real, DEFAULT_CEILING};
use crate::reduction::{pow10_ceil, reduce_to_fixpoint, KPolicy, ReductionChain, ReductionProblem};

/// `(x, y)` with `y + x sqrt3 = (1 + sqrt3)(2 + sqrt3)^r`.
pub fn sqrt3_solution(r: u64) -> (BigInt, BigInt) {
    let (mut y, mut x) = (BigInt::one(), BigInt::one());
    for _ in 0..r {
        // (y + x sqrt3)(2 + sqrt3)
        let ny = &y * 2 + &x * 3;
        let nx = &y + &x * 2;
        y = ny;
        x = nx;
    }
    (x, y)
}

/// `(x, z)` with `z + x sqrt8 = (family + sqrt8)(3 + sqrt8)^s`, `family = +-1`.
pub fn sqrt8_solution(s: u64, family: i8) -> (BigInt, BigInt) {
    let (mut z, mut x) = (BigInt::from(family), BigInt::one());
    for _ in 0..s {
        let nz = &z * 3 + &x * 8;
        let nx = &z + &x * 3;
        z = nz;
        x = nx;
    }
    (x, z)
}

/// `alpha3 = sqrt3 (family + sqrt8) / (sqrt8 (1 + sqrt3))`.
pub fn alpha3(family: i8) -> Q23 {
    let sqrt8 = Q23::new(0, 2, 0, 0);
    let num = &Q23::sqrt3() * &(&Q23::new(family as i64, 0, 0, 0) + &sqrt8);
    let den = &sqrt8 * &Q23::new(1, 0, 1, 0);
    &num * &den.inv().expect("nonzero")
}

/// Class representatives `(z, x)`, `x > 0`, of `z^2 - d x^2 = -n` modulo the unit
/// `u + v sqrt d`, from the classical bound `x^2 <= v^2 n / (2(u - 1))`, `z^2 <= (u - 1) n / 2`.
pub fn class_representatives(d: i64, n: i64, u: i64, v: i64) -> Vec<(i64, i64)> {
    let mut reps: Vec<(i64, i64)> = Vec::new();
    let mut x = 1;
    while 2 * (u - 1) * x * x <= v * v * n {
        if let Some(z) = exact_sqrt(&BigInt::from(d * x * x - n)).and_then(|z| z.to_i64()) {
            for z in [z, -z] {
                let same = reps.iter().any(|&(z2, x2)| {
                    // (z + x sqrt d) / (z2 + x2 sqrt d) is an integral unit
                    let a = z * z2 - d * x * x2;
                    let b = x * z2 - z * x2;
                    a % n == 0 && b % n == 0
                });
                if !same && !reps.contains(&(z, x)) {
                    reps.push((z, x));
                }
            }
        }
        x += 1;
    }
    reps.sort();
    reps
}

/// Certified shape `|r theta - s + phi| < mult * base^-r` for `r >= r_min`.
#[derive(Clone, Debug)]
pub struct QuadrupleInequality {
    /// `|Lambda| < lambda_coefficient * (alpha^2)^-r`
    pub lambda_coefficient: BigRational,
    pub mult: BigRational,
    pub base: BigRational,
    pub r_min: u64,
    /// Named constants with the rational bounds that were certified.
    pub checks: Vec<(String, String)>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn quadruple_inequality(ceiling: u32) -> Result<QuadrupleInequality> {
    let s3 = Real::int(3).sqrt();
    let s8 = Real::int(8).sqrt();
    let one = Real::int(1);
    let alpha = Real::int(2) + &s3;
    let beta = Real::int(3) + &s8;
    // (name, value, bound, value <= bound?)
    let c1 = (&s3 - &one) / (Real::int(2) * &s3);
    let c2 = (&s8 + &one) / (Real::int(2) * &s8);
    let c3 = (&one + &s3) / (Real::int(2) * &s3);
    let c4 = Real::int(2) * &s8 / (&one + &s8);
    let c5 = Real::int(2) * &s8 / (&s8 - &one);
    let (c1u, c2u, c3l, c4l, c5u, base) = (
        rat(11, 50),
        rat(17, 25),
        rat(39, 50),
        rat(147, 100),
        rat(31, 10),
        rat(13, 1),
    );
    let lnb_l = rat(176, 100);
    let checks: Vec<(&str, Real, BigRational, bool)> = vec![
        ("(sqrt3-1)/(2 sqrt3)", c1.clone(), c1u.clone(), true),
        ("(sqrt8+1)/(2 sqrt8)", c2, c2u.clone(), true),
        ("(1+sqrt3)/(2 sqrt3)", c3.clone(), c3l.clone(), false),
        ("2 sqrt8/(1+sqrt8)", c4, c4l.clone(), false),
        ("2 sqrt8/(sqrt8-1)", c5, c5u.clone(), true),
        ("(2+sqrt3)^2", alpha.powi(2), base.clone(), false),
        ("log(3+sqrt8)", beta.ln(), lnb_l.clone(), false),
        // x <= alpha^r for r >= 1
        (
            "(1-c3)(2+sqrt3) - c1",
            (&one - &c3) * &alpha - &c1,
            BigRational::zero(),
            false,
        ),
        // beta^s <= c5 x <= c5 alpha^r, so s <= r theta + log(c5)/log(beta) < r + 1 for r >= 2
        (
            "log(2+sqrt3)/log(3+sqrt8)",
            alpha.ln() / beta.ln(),
            BigRational::one(),
            true,
        ),
        (
            "(2 log(2+sqrt3) + log(31/10))/log(3+sqrt8) - 2",
            (Real::int(2) * alpha.ln() + Real::rational(c5u.clone()).ln()) / beta.ln() - Real::int(2),
            rat(1, 2),
            true,
        ),
    ];
    let mut record = Vec::new();
    for (name, value, bound, upper) in checks {
        let b = Real::rational(bound.clone());
        let ok = if upper {
            compare(&value, &b, ceiling)?.is_false()
        } else {
            compare(&b, &value, ceiling)?.is_false()
        };
        if !ok {
            return Err(Error::Verification(format!(
                "could not certify {name} {} {bound}",
                if upper { "<=" } else { ">=" }
            )));
        }
        record.push((name.to_string(), format!("{} {bound}", if upper { "<=" } else { ">=" })));
    }
    // |P - Q| <= max(c2 beta^-s, c1 alpha^-r) <= max(c2/c4, c1) / (x - 1) and P, Q >= x - 1
    let k = (&c2u / &c4l).max(c1u);
    // x - 1 >= c3 alpha^r (1 - 1/(c3 alpha^2)) for r >= 2
    let low_x = &c3l * (BigRational::one() - BigRational::one() / (&c3l * &base));
    let u = &k / (&low_x * &low_x);
    let u_max = &u / (&base * &base);
    let lambda_coefficient = &u / (BigRational::one() - u_max);
    let mult = (&lambda_coefficient / &lnb_l).max(BigRational::one());
    Ok(QuadrupleInequality {
        lambda_coefficient,
        mult,
        base,
        r_min: 2,
        checks: record,
    })
}

#[derive(Clone, Debug)]
pub struct FamilyReduction {
    pub family: i8,
    pub alpha3: Q23,
    pub minimal_polynomial: Vec<BigInt>,
    pub initial_bound: BoundResult,
    pub chain: ReductionChain,
}

#[derive(Clone, Debug)]
pub struct QuadrupleReport {
    pub sqrt3: Vec<(u64, BigInt, BigInt)>,
    pub sqrt8: Vec<(u64, BigInt, BigInt, i8)>,
    pub sqrt8_classes: Vec<(i64, i64)>,
    pub inequality: QuadrupleInequality,
    pub families: Vec<FamilyReduction>,
    pub final_bound: u64,
    /// `(r, x, N)` for every `r <= final_bound` with `8x^2 - 7` a square.
    pub hits: Vec<(u64, BigInt, BigInt)>,
    pub no_other_n: bool,
}

impl QuadrupleReport {
    pub fn initial_bound_log10(&self) -> f64 {
        self.families
            .iter()
            .map(|f| f.initial_bound.value_f64())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn conclusion(&self) -> &'static str {
        if self.no_other_n {
            "no_fifth_element"
        } else {
            "additional_element_found"
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let poly = |p: &[BigInt]| p.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        json!({
            "problem": "N with N+1, 3N+1, 8N+1 all squares",
            "sqrt3_indices": self.sqrt3.iter().map(|(r, x, y)| json!({"r": r, "x": x.to_string(), "y": y.to_string()})).collect::<Vec<_>>(),
            "sqrt8_indices": self.sqrt8.iter().map(|(s, x, z, f)| json!({"s": s, "x": x.to_string(), "z": z.to_string(), "family": f})).collect::<Vec<_>>(),
            "sqrt8_class_representatives": self.sqrt8_classes.iter().map(|(z, x)| json!([z, x])).collect::<Vec<_>>(),
            "inequality": {
                "lambda_coefficient": self.inequality.lambda_coefficient.to_string(),
                "A": self.inequality.mult.to_string(),
                "C": self.inequality.base.to_string(),
                "r_min": self.inequality.r_min,
                "certified_constants": self.inequality.checks.iter().map(|(n, b)| json!([n, b])).collect::<Vec<_>>(),
            },
            "linear_forms": self.families.iter().map(|f| json!({
                "family": f.family,
                "alpha1": "2+sqrt(3)",
                "alpha2": "3+sqrt(8)",
                "alpha3": f.alpha3.to_string(),
                "alpha3_minimal_polynomial": poly(&f.minimal_polynomial),
                "coefficients": ["r", "-s", "-1"],
                "initial_bound": f.initial_bound.to_json(),
                "reduction": f.chain.to_json(),
            })).collect::<Vec<_>>(),
            "final_bound": self.final_bound,
            "exhaustive_check": {
                "r_range": [0, self.final_bound],
                "hits": self.hits.iter().map(|(r, x, n)| json!({"r": r, "x": x.to_string(), "N": n.to_string()})).collect::<Vec<_>>(),
            },
            "conclusion": self.conclusion(),
        })
    }
}

pub fn solve_quadruple() -> Result<QuadrupleReport> {
    solve_quadruple_with(&KPolicy::default(), DEFAULT_CEILING)
}

pub fn solve_quadruple_with(policy: &KPolicy, ceiling: u32) -> Result<QuadrupleReport> {
    let ineq = quadruple_inequality(ceiling.min(1 << 14))?;
    let alpha = Q23::new(2, 0, 1, 0);
    let beta = Q23::new(3, 2, 0, 0);
    let theta = alpha.to_real().ln() / beta.to_real().ln();
    let mut families = Vec::new();
    for family in [1i8, -1] {
        let a3 = alpha3(family);
        let norm = a3.norm();
        if norm == BigRational::one() || norm == -BigRational::one() {
            // alpha, beta are units, so Lambda = 0 needs alpha3 to be one too
            return Err(Error::Verification(
                "alpha3 is a unit; the linear form may vanish".into(),
            ));
        }
        let minimal_polynomial = a3.minimal_polynomial();
        let height = |q: &Q23| {
            q.minimal_polynomial()
                .iter()
                .map(|c| c.magnitude().clone())
                .max()
                .unwrap()
        };
        let heights = [height(&alpha), height(&beta), height(&a3)]
            .into_iter()
            .map(|h| Real::int(BigInt::from(h)))
            .collect();
        // |Lambda| < 13^-r <= exp(-H) with H = max(r, s) = r
        let req = BoundRequest::new(3, 4, BigRational::one(), Real::int(4)).with_heights(heights);
        let initial_bound = bound_lf4(&req)?;
        let log10_r = BigRational::from_integer(initial_bound.log10_bound.upper().ceil());
        let phi = -(a3.to_real().ln() / beta.to_real().ln());
        let prob = ReductionProblem::new(
            theta.clone(),
            phi,
            ineq.mult.clone(),
            ineq.base.clone(),
            pow10_ceil(&log10_r)?,
        )?
        .with_ceiling(ceiling);
        let chain = reduce_to_fixpoint(&prob, policy)?;
        families.push(FamilyReduction {
            family,
            alpha3: a3,
            minimal_polynomial,
            initial_bound,
            chain,
        });
    }
    let final_bound = families
        .iter()
        .map(|f| f.chain.final_bound.to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(0)
        .max(ineq.r_min);
    if final_bound > 100_000 {
        return Err(Error::Stalled(format!(
            "final bound {final_bound} is too large to search"
        )));
    }

    let mut sqrt3 = Vec::new();
    let mut hits: Vec<(u64, BigInt, BigInt)> = Vec::new();
    for r in 0..=final_bound {
        let (x, y) = sqrt3_solution(r);
        let t = BigInt::from(8) * &x * &x - 7;
        if exact_sqrt(&t).is_some() {
            hits.push((r, x.clone(), &x * &x - 1));
        }
        sqrt3.push((r, x, y));
    }
    let x_max = sqrt3.last().map(|e| e.1.clone()).unwrap_or_default();
    let mut sqrt8 = Vec::new();
    for family in [1i8, -1] {
        let mut s = 0;
        loop {
            let (x, z) = sqrt8_solution(s, family);
            if x > x_max {
                break;
            }
            sqrt8.push((s, x, z, family));
            s += 1;
        }
    }
    let no_other_n = hits.iter().all(|(_, _, n)| n.is_zero() || n == &BigInt::from(120));
    Ok(QuadrupleReport {
        sqrt3,
        sqrt8,
        sqrt8_classes: class_representatives(8, 7, 3, 1),
        inequality: ineq,
        families,
        final_bound,
        hits,
        no_other_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt3_first_values() {
        let xs: Vec<BigInt> = (0..3).map(|r| sqrt3_solution(r).0).collect();
        assert_eq!(xs, vec![BigInt::from(1), 3.into(), 11.into()]);
        let ns: Vec<BigInt> = xs.iter().map(|x| x * x - 1).collect();
        assert_eq!(ns, vec![BigInt::from(0), 8.into(), 120.into()]);
    }

    #[test]
    fn sqrt8_second_family() {
        let (x, z) = sqrt8_solution(2, -1);
        assert_eq!((x.clone(), z.clone()), (BigInt::from(11), BigInt::from(31)));
        assert_eq!(&z * &z - BigInt::from(8) * &x * &x, BigInt::from(-7));
    }

    #[test]
    fn recurrences_hold() {
        for r in 1..50 {
            let (a, _) = sqrt3_solution(r - 1);
            let (b, _) = sqrt3_solution(r);
            let (c, y) = sqrt3_solution(r + 1);
            assert_eq!(c, &b * 4 - &a);
            assert_eq!(&y * &y - BigInt::from(3) * &c * &c, BigInt::from(-2));
        }
        for f in [1, -1] {
            for s in 1..50 {
                let (a, _) = sqrt8_solution(s - 1, f);
                let (b, _) = sqrt8_solution(s, f);
                let (c, z) = sqrt8_solution(s + 1, f);
                assert_eq!(c, &b * 6 - &a);
                assert_eq!(&z * &z - BigInt::from(8) * &c * &c, BigInt::from(-7));
            }
        }
    }

    #[test]
    fn class_representatives_match_families() {
        assert_eq!(class_representatives(8, 7, 3, 1), vec![(-1, 1), (1, 1)]);
        assert_eq!(class_representatives(3, 2, 2, 1).len(), 1);
        // every x <= 10^6 solving z^2 - 8x^2 = -7 appears in one of the two families
        let mut fam: Vec<i64> = Vec::new();
        for f in [1, -1] {
            for s in 0..12 {
                fam.push(sqrt8_solution(s, f).0.to_i64().unwrap());
            }
        }
        for x in 1..1_000_000i64 {
            if exact_sqrt(&BigInt::from(8 * x * x - 7)).is_some() {
                assert!(fam.contains(&x), "x = {x}");
            }
        }
    }

    #[test]
    fn alpha3_closed_form_and_polynomial() {
        // (3 - sqrt3)(4 + sqrt2)/8
        let expect = &(&Q23::new(3, 0, -1, 0) * &Q23::new(4, 1, 0, 0)) * &Q23::rational(rat(1, 8));
        assert_eq!(alpha3(1), expect);
        let p: Vec<i64> = alpha3(1)
            .minimal_polynomial()
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect();
        assert_eq!(p, vec![256, -1536, 2880, -2016, 441]);
        assert_eq!(alpha3(-1).minimal_polynomial(), alpha3(1).minimal_polynomial());
    }

    #[test]
    fn inequality_constants_certify() {
        let q = quadruple_inequality(1 << 12).unwrap();
        assert!(q.lambda_coefficient < BigRational::one());
        assert_eq!(q.mult, BigRational::one());
    }

    #[test]
    fn inequality_holds_on_known_solution() {
        // x = 11: r = 2, s = 2 in the second family
        let q = quadruple_inequality(1 << 12).unwrap();
        let alpha = Real::int(2) + Real::int(3).sqrt();
        let beta = Real::int(3) + Real::int(8).sqrt();
        let lam = Real::int(2) * alpha.ln() - Real::int(2) * beta.ln() - alpha3(-1).to_real().ln();
        let rhs = Real::rational(&q.lambda_coefficient / num_traits::pow(q.base.clone(), 2));
        assert!(compare(&rhs, &lam, 4096).unwrap().is_true());
        assert!(compare(&lam, &-rhs, 4096).unwrap().is_true());
    }

    #[test]
    fn full_pipeline() {
        let rep = solve_quadruple().unwrap();
        let b = rep.initial_bound_log10();
        assert!((300.0..700.0).contains(&b), "{b}");
        assert!(rep.final_bound <= 2000);
        assert_eq!(rep.conclusion(), "no_fifth_element");
        let ns: Vec<BigInt> = rep.hits.iter().map(|h| h.2.clone()).collect();
        assert_eq!(ns, vec![BigInt::from(0), BigInt::from(120)]);
        for f in &rep.families {
            for c in &f.chain.certificates {
                c.verify(1 << 16).unwrap();
            }
        }
    }
}
