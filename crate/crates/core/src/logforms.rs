//! Explicit lower bounds for linear forms in logarithms, and the height bounds
//! they imply, evaluated as certified reals in log10 space.
//!
//! The evaluators only compute the formulas. Checking that a given instance
//! satisfies the analytic hypothesis of the corresponding theorem (for example
//! `0 < |b_1 log a_1 + ... + b_n log a_n| < exp(-delta H)`) is the caller's job.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::numeric::{compare, parse_expr, CertifiedReal, Real, Verdict};

/// Precision ceiling used when certifying bound values.
const CEILING: u32 = 1 << 14;

/// Which bound a [`BoundResult`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `H < (4^(n^2) delta^-1 d^(2n) log A)^((2n+1)^2)` (Baker 1968).
    Lf4,
    /// Height of a dependence relation: `(4^(n^2) d^(2n) log A)^((2n+1)^2)`.
    Rel,
    /// `|Lambda| > (B Omega)^(-C0 Omega log Omega')`, `C0 = (16 n D)^(200 n)` (Baker 1977).
    Sharp77Inhomogeneous,
    /// The rational case `|Lambda| > B^(-C0 Omega log Omega')`.
    Sharp77Rational,
    /// `|Lambda| > B^(-C1 Omega)`, `C1 = (16 n D)^(2n+4)` (Baker–Wüstholz).
    Bw93,
    /// `max(|x|,|y|) <= exp((10^10 |k|)^10000)` for `y^2 = x^3 + k`.
    Mordell,
    /// `max(|x|,|y|) <= (300000 |m|)^23` for `x^3 - 2 y^3 = m`.
    ThueCubic,
}

impl Formula {
    pub const ALL: [Formula; 7] = [
        Formula::Lf4,
        Formula::Rel,
        Formula::Sharp77Inhomogeneous,
        Formula::Sharp77Rational,
        Formula::Bw93,
        Formula::Mordell,
        Formula::ThueCubic,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Formula::Lf4 => "lf4",
            Formula::Rel => "rel",
            Formula::Sharp77Inhomogeneous => "sharp77-inhomogeneous",
            Formula::Sharp77Rational => "sharp77-rational",
            Formula::Bw93 => "bw93",
            Formula::Mordell => "mordell",
            Formula::ThueCubic => "thue-cubic",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Formula::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown formula {s:?}")))
    }
}

/// Parameters of the linear-form bounds. Heights are given per term; formulas
/// that take a single height `A` use the largest.
#[derive(Clone, Debug)]
pub struct BoundRequest {
    pub n: u32,
    /// Degree bound `d` of the algebraic numbers.
    pub d: u32,
    /// Degree `D` of the field generated by all numbers involved.
    pub field_degree: u32,
    pub delta: BigRational,
    /// Height bounds `A_i`, as real expressions (e.g. `4`, `10^6`, `exp(4)`).
    pub heights: Vec<Real>,
    /// Bound `B` on the coefficients.
    pub b: BigInt,
}

impl BoundRequest {
    pub fn new(n: u32, d: u32, delta: BigRational, a: Real) -> Self {
        BoundRequest {
            n,
            d,
            field_degree: d,
            delta,
            heights: vec![a],
            b: BigInt::from(4),
        }
    }

    pub fn with_heights(mut self, heights: Vec<Real>) -> Self {
        self.heights = heights;
        self
    }

    pub fn with_b(mut self, b: BigInt) -> Self {
        self.b = b;
        self
    }

    pub fn with_field_degree(mut self, d: u32) -> Self {
        self.field_degree = d;
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "d": self.d,
            "D": self.field_degree,
            "delta": self.delta.to_string(),
            "heights": self.heights.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "B": self.b.to_string(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |k: &str| Error::Parse(format!("bound inputs: missing or malformed {k:?}"));
        let uint = |k: &str| -> Result<u32> {
            v.get(k)
                .and_then(|x| x.as_u64())
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| bad(k))
        };
        let delta = v.get("delta").and_then(|x| x.as_str()).ok_or_else(|| bad("delta"))?;
        let heights = v
            .get("heights")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("heights"))?
            .iter()
            .map(|h| h.as_str().ok_or_else(|| bad("heights")).and_then(parse_expr))
            .collect::<Result<Vec<_>>>()?;
        let b = v
            .get("B")
            .and_then(|x| x.as_str())
            .and_then(|x| x.parse::<BigInt>().ok())
            .ok_or_else(|| bad("B"))?;
        Ok(BoundRequest {
            n: uint("n")?,
            d: uint("d")?,
            field_degree: uint("D")?,
            delta: delta.parse().map_err(|_| bad("delta"))?,
            heights,
            b,
        })
    }
}

/// How `BoundResult::log10_bound` relates to the bound itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// `log10(bound)`
    Log10,
    /// `log10(log10(bound))`
    Log10Log10,
}

#[derive(Clone, Debug)]
pub struct BoundResult {
    pub formula: Formula,
    pub scale: Scale,
    pub log10_bound: CertifiedReal,
    /// For the double-log Mordell bound: `log10(ln(bound))`, the exponent printed
    /// in `10^(10^e)`-style statements.
    pub inner_exponent: Option<CertifiedReal>,
    pub inputs: serde_json::Value,
    pub warnings: Vec<String>,
}

impl BoundResult {
    pub fn value_f64(&self) -> f64 {
        self.log10_bound.to_f64()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "formula": self.formula.id(),
            "inputs": self.inputs,
            "warnings": self.warnings,
        });
        let key = match self.scale {
            Scale::Log10 => "log10_bound",
            Scale::Log10Log10 => "log10_log10_bound",
        };
        v[key] = json!(decimal_summary(&self.log10_bound));
        v["enclosure"] = json!([
            self.log10_bound.lower().to_string(),
            self.log10_bound.upper().to_string()
        ]);
        if let Some(inner) = &self.inner_exponent {
            v["inner_exponent"] = json!(decimal_summary(inner));
        }
        v
    }
}

/// Certified decimal rendering: integer-rounded for huge values, otherwise 6 places.
fn decimal_summary(c: &CertifiedReal) -> String {
    let mag = c.interval().hi.abs().max(c.interval().lo.abs()).magnitude();
    if mag > 64 {
        // astronomically large: scientific notation from the lower endpoint
        let lo = c.lower().floor();
        let s = lo.abs().to_string();
        let sign = if lo.is_negative() { "-" } else { "" };
        format!("{sign}{}.{}e{}", &s[..1], &s[1..s.len().min(16)], s.len() - 1)
    } else {
        c.lower().to_decimal_floor(6)
    }
}

fn log10(x: Real) -> Real {
    x.ln() / Real::int(10).ln()
}

fn finish(
    formula: Formula,
    scale: Scale,
    value: Real,
    inputs: serde_json::Value,
    warnings: Vec<String>,
) -> Result<BoundResult> {
    let log10_bound = certify_tight(&value)?;
    Ok(BoundResult {
        formula,
        scale,
        log10_bound,
        inner_exponent: None,
        inputs,
        warnings,
    })
}

/// Width below `2^-40`, or `2^-50` relative for large values.
fn certify_tight(value: &Real) -> Result<CertifiedReal> {
    let c = value.certify(CEILING)?;
    let mag = c.interval().hi.abs().max(c.interval().lo.abs()).magnitude();
    let target = if mag <= 10 { -40 } else { mag - 50 };
    value.enclose_to_width(target, CEILING)
}

fn at_least_four(x: &Real, what: &str, warnings: &mut Vec<String>) -> Result<Real> {
    let four = Real::int(4);
    match compare(&four, x, 4096)? {
        Verdict::True => {
            warnings.push(format!("{what} = {x} is below 4; clamped to 4"));
            Ok(four)
        }
        Verdict::False => Ok(x.clone()),
        Verdict::Unknown(_) => Ok(x.clone()),
    }
}

fn max_height(heights: &[Real]) -> Result<Real> {
    let mut it = heights.iter();
    let mut best = it
        .next()
        .ok_or_else(|| Error::invalid("at least one height is required"))?
        .clone();
    for h in it {
        if compare(h, &best, 4096)?.is_true() {
            best = h.clone();
        }
    }
    Ok(best)
}

fn check_delta(delta: &BigRational) -> Result<()> {
    if !delta.is_positive() || delta > &BigRational::one() {
        return Err(Error::invalid(format!("delta = {delta} must satisfy 0 < delta <= 1")));
    }
    Ok(())
}

fn lf4_core(req: &BoundRequest, with_delta: bool, formula: Formula) -> Result<BoundResult> {
    if req.n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if formula == Formula::Rel && req.n < 2 {
        return Err(Error::invalid("a dependence relation needs n >= 2"));
    }
    if with_delta {
        check_delta(&req.delta)?;
    }
    let mut warnings = Vec::new();
    let d = if req.d < 4 {
        warnings.push(format!("degree bound d = {} is below 4; clamped to 4", req.d));
        4
    } else {
        req.d
    };
    let a = at_least_four(&max_height(&req.heights)?, "height A", &mut warnings)?;
    let n = req.n as u64;
    // log10 of the base: n^2 log10 4 - log10 delta + 2n log10 d + log10 log A
    let mut base = Real::int(n * n) * log10(Real::int(4)) + Real::int(2 * n) * log10(Real::int(d)) + log10(a.ln());
    if with_delta && !req.delta.is_one() {
        base = base - log10(Real::rational(req.delta.clone()));
    }
    let value = Real::int((2 * n + 1) * (2 * n + 1)) * base;
    finish(formula, Scale::Log10, value, req.to_json(), warnings)
}

/// Height bound for `0 < |b_1 log a_1 + ... + b_n log a_n| < exp(-delta H)`.
pub fn bound_lf4(req: &BoundRequest) -> Result<BoundResult> {
    lf4_core(req, true, Formula::Lf4)
}

/// Bound on the coefficients of a relation among linearly dependent logarithms.
pub fn bound_dependence_relation(req: &BoundRequest) -> Result<BoundResult> {
    lf4_core(req, false, Formula::Rel)
}

/// `Omega = prod log A_i` and `Omega' = Omega / log A_n`, requiring every `A_i >= 4`.
fn omegas(req: &BoundRequest) -> Result<(Real, Real)> {
    if req.heights.len() != req.n as usize {
        return Err(Error::invalid(format!(
            "expected {} per-term heights, got {}",
            req.n,
            req.heights.len()
        )));
    }
    for (i, h) in req.heights.iter().enumerate() {
        if compare(&Real::int(4), h, 4096)?.is_true() {
            return Err(Error::invalid(format!("height A_{} = {h} is below 4", i + 1)));
        }
    }
    let logs: Vec<Real> = req.heights.iter().map(|h| h.ln()).collect();
    let omega = logs[1..].iter().fold(logs[0].clone(), |acc, l| acc * l);
    let omega_prime = if logs.len() == 1 {
        Real::int(1)
    } else {
        logs[..logs.len() - 1]
            .iter()
            .skip(1)
            .fold(logs[0].clone(), |acc, l| acc * l)
    };
    Ok((omega, omega_prime))
}

fn check_b(b: &BigInt) -> Result<()> {
    if b < &BigInt::from(4) {
        return Err(Error::invalid(format!("B = {b} must be at least 4")));
    }
    Ok(())
}

/// `-log10 |Lambda|` lower-bound exponent from the 1977 estimate.
pub fn bound_sharp77(req: &BoundRequest, inhomogeneous: bool) -> Result<BoundResult> {
    if req.n == 0 || req.field_degree == 0 {
        return Err(Error::invalid("n and D must be at least 1"));
    }
    check_b(&req.b)?;
    let (omega, omega_prime) = omegas(req)?;
    let log_op = omega_prime.ln();
    match crate::numeric::certified_sign(&log_op, 4096)? {
        (Some(1), _) => {}
        _ => {
            return Err(Error::invalid(
                "log Omega' must be positive (Omega' = Omega / log A_n <= 1)",
            ))
        }
    }
    let n = req.n as u64;
    let c0 = num_traits::pow(BigInt::from(16 * n * req.field_degree as u64), (200 * n) as usize);
    let exponent = Real::int(c0) * &omega * log_op;
    let b = Real::int(req.b.clone());
    let (value, formula) = if inhomogeneous {
        (exponent * log10(b * omega), Formula::Sharp77Inhomogeneous)
    } else {
        (exponent * log10(b), Formula::Sharp77Rational)
    };
    finish(formula, Scale::Log10, value, req.to_json(), Vec::new())
}

/// `-log10 |Lambda|` lower-bound exponent from the 1993 estimate (rational case).
pub fn bound_bw93(req: &BoundRequest) -> Result<BoundResult> {
    if req.n == 0 || req.field_degree == 0 {
        return Err(Error::invalid("n and D must be at least 1"));
    }
    check_b(&req.b)?;
    let (omega, _) = omegas(req)?;
    let value = Real::int(bw93_constant(req.n, req.field_degree)) * omega * log10(Real::int(req.b.clone()));
    finish(Formula::Bw93, Scale::Log10, value, req.to_json(), Vec::new())
}

/// `C1 = (16 n D)^(2n+4)`.
pub fn bw93_constant(n: u32, field_degree: u32) -> BigInt {
    num_traits::pow(
        BigInt::from(16u64 * n as u64 * field_degree as u64),
        (2 * n + 4) as usize,
    )
}

/// `C0 = (16 n D)^(200 n)`.
pub fn sharp77_constant(n: u32, field_degree: u32) -> BigInt {
    num_traits::pow(BigInt::from(16u64 * n as u64 * field_degree as u64), (200 * n) as usize)
}

/// Double-log bound for integral points on `y^2 = x^3 + k`.
pub fn bound_mordell(k: &BigInt) -> Result<BoundResult> {
    if k.is_zero() {
        return Err(Error::invalid("k must be nonzero"));
    }
    // log10(ln bound) = 10000 * log10(10^10 |k|)
    let inner = Real::int(10000) * (Real::int(10) + log10(Real::int(k.abs())));
    // log10(log10 bound) = inner + log10(log10 e)
    let value = &inner + log10(Real::int(1) / Real::int(10).ln());
    let mut res = finish(
        Formula::Mordell,
        Scale::Log10Log10,
        value,
        json!({ "k": k.to_string() }),
        Vec::new(),
    )?;
    res.inner_exponent = Some(certify_tight(&inner)?);
    Ok(res)
}

/// `log10 (300000 |m|)^23`.
pub fn bound_thue_cubic(m: &BigInt) -> Result<BoundResult> {
    if m.is_zero() {
        return Err(Error::invalid("m must be nonzero"));
    }
    let value = Real::int(23) * log10(Real::int(BigInt::from(300000) * m.abs()));
    finish(
        Formula::ThueCubic,
        Scale::Log10,
        value,
        json!({ "m": m.to_string() }),
        Vec::new(),
    )
}

/// Re-evaluate a serialized bound from its formula id and inputs.
pub fn evaluate(formula: Formula, inputs: &serde_json::Value) -> Result<BoundResult> {
    let int_field = |k: &str| -> Result<BigInt> {
        inputs
            .get(k)
            .and_then(|x| x.as_str())
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bound inputs: missing {k:?}")))
    };
    match formula {
        Formula::Mordell => bound_mordell(&int_field("k")?),
        Formula::ThueCubic => bound_thue_cubic(&int_field("m")?),
        Formula::Lf4 => bound_lf4(&BoundRequest::from_json(inputs)?),
        Formula::Rel => bound_dependence_relation(&BoundRequest::from_json(inputs)?),
        Formula::Sharp77Inhomogeneous => bound_sharp77(&BoundRequest::from_json(inputs)?, true),
        Formula::Sharp77Rational => bound_sharp77(&BoundRequest::from_json(inputs)?, false),
        Formula::Bw93 => bound_bw93(&BoundRequest::from_json(inputs)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn lf4(n: u32, delta: BigRational, d: u32, a: Real) -> f64 {
        bound_lf4(&BoundRequest::new(n, d, delta, a)).unwrap().value_f64()
    }

    #[test]
    fn lf4_exponential_gap_instance() {
        let v = lf4(2, q(1, 2), 4, Real::int(4));
        assert!((131.0..132.0).contains(&v), "{v}");
    }

    #[test]
    fn lf4_n1_is_direct_substitution() {
        let v = lf4(1, q(1, 1), 4, Real::int(4));
        let direct = 9.0 * (4.0 * 16.0 * 4f64.ln()).log10();
        assert!((v - direct).abs() < 1e-9, "{v} vs {direct}");
    }

    #[test]
    fn clamps_below_floor_with_warning() {
        let r = bound_lf4(&BoundRequest::new(2, 2, q(1, 2), Real::int(3))).unwrap();
        assert_eq!(r.warnings.len(), 2);
        assert!((r.value_f64() - lf4(2, q(1, 2), 4, Real::int(4))).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(bound_lf4(&BoundRequest::new(2, 4, q(0, 1), Real::int(4))).is_err());
        assert!(bound_lf4(&BoundRequest::new(2, 4, q(3, 2), Real::int(4))).is_err());
    }

    #[test]
    fn relation_bound_matches_delta_one() {
        let rel = bound_dependence_relation(&BoundRequest::new(2, 4, q(1, 2), Real::int(4))).unwrap();
        assert!((rel.value_f64() - lf4(2, q(1, 1), 4, Real::int(4))).abs() < 1e-12);
        let rel3 = bound_dependence_relation(&BoundRequest::new(3, 4, q(1, 1), Real::int(4))).unwrap();
        let direct = 49.0 * (4f64.powi(9) * 4f64.powi(6) * 4f64.ln()).log10();
        assert!((rel3.value_f64() - direct).abs() < 1e-9);
        assert!(bound_dependence_relation(&BoundRequest::new(1, 4, q(1, 1), Real::int(4))).is_err());
    }

    #[test]
    fn bw93_constants_and_substitution() {
        assert_eq!(bw93_constant(2, 1), BigInt::from(1099511627776u64));
        let req = BoundRequest::new(3, 4, q(1, 1), Real::int(4))
            .with_field_degree(12)
            .with_heights(vec![Real::int(4).exp(), Real::int(4).exp(), Real::int(4).exp()])
            .with_b(BigInt::from(1_000_000));
        let r = bound_bw93(&req).unwrap();
        let expected = num_traits::pow(BigInt::from(576), 10) * 64 * 6;
        let c = r.log10_bound;
        assert!(c.lower().floor() <= expected && c.upper().ceil() >= expected);
        assert!(c.width().magnitude() < -20);
    }

    #[test]
    fn sharp77_rational_instance() {
        let req = BoundRequest::new(2, 4, q(1, 1), Real::int(4))
            .with_field_degree(1)
            .with_heights(vec![Real::int(16), Real::int(16)])
            .with_b(BigInt::from(10));
        let r = bound_sharp77(&req, false).unwrap();
        // C0 * (ln 16)^2 * ln ln 16, C0 = 2^2000
        let l16 = 16f64.ln();
        let mant = l16 * l16 * l16.ln();
        let log10_expected = 2000.0 * 2f64.log10() + mant.log10();
        let got = r.log10_bound.lower().magnitude() as f64 * 2f64.log10();
        assert!((got - log10_expected).abs() < 1.0);
        let doubled = bound_sharp77(&req.clone().with_b(BigInt::from(20)), false).unwrap();
        let diff = doubled
            .log10_bound
            .lower()
            .div(r.log10_bound.lower(), 64, crate::numeric::Round::Floor)
            .to_f64();
        assert!((diff - (1.0 + 2f64.log10())).abs() < 1e-12);
        let inh = bound_sharp77(&req, true).unwrap();
        assert!(inh.log10_bound.lower() > r.log10_bound.upper());
    }

    #[test]
    fn sharp77_needs_positive_log_omega_prime() {
        let req = BoundRequest::new(1, 4, q(1, 1), Real::int(16))
            .with_field_degree(1)
            .with_b(BigInt::from(10));
        assert!(bound_sharp77(&req, false).is_err());
        let low = BoundRequest::new(2, 4, q(1, 1), Real::int(4))
            .with_heights(vec![Real::int(3), Real::int(16)])
            .with_b(BigInt::from(10));
        assert!(bound_sharp77(&low, false).is_err());
    }

    #[test]
    fn mordell_and_thue_bounds() {
        let r = bound_mordell(&BigInt::from(1621)).unwrap();
        let inner = r.inner_exponent.as_ref().unwrap();
        assert_eq!(inner.to_f64().round(), 132098.0);
        let one = bound_mordell(&BigInt::from(1)).unwrap();
        let inner1 = one.inner_exponent.unwrap();
        assert!(inner1.interval().contains(&crate::numeric::Dyadic::from_int(100000)));
        assert!(bound_mordell(&BigInt::from(0)).is_err());

        let t = bound_thue_cubic(&BigInt::from(1621)).unwrap().value_f64();
        assert!((199.0..201.0).contains(&t), "{t}");
        let t1 = bound_thue_cubic(&BigInt::from(1)).unwrap().value_f64();
        assert!((t1 - 23.0 * 300000f64.log10()).abs() < 1e-9);
        let tn = bound_thue_cubic(&BigInt::from(-1621)).unwrap().value_f64();
        assert_eq!(t, tn);
    }

    #[test]
    fn json_round_trip_of_formula_ids() {
        for f in Formula::ALL {
            assert_eq!(f.id().parse::<Formula>().unwrap(), f);
        }
        let req = BoundRequest::new(3, 4, q(1, 2), Real::int(10).powi(6));
        let r = bound_lf4(&req).unwrap();
        let j = r.to_json();
        let f: Formula = j["formula"].as_str().unwrap().parse().unwrap();
        let again = evaluate(f, &j["inputs"]).unwrap();
        assert_eq!(again.log10_bound.lower(), r.log10_bound.lower());
    }
}
