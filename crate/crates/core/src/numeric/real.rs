use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::interval::Interval;
use super::kernels;
use crate::error::{Error, Result};

/// Starting working precision for every refinement loop.
pub const DEFAULT_PRECISION: u32 = 128;
/// Default ceiling for refinement loops (2^20 bits).
pub const DEFAULT_CEILING: u32 = 1 << 20;

#[derive(Debug)]
enum Node {
    Rational(BigRational),
    Pi,
    Add(Real, Real),
    Sub(Real, Real),
    Mul(Real, Real),
    Div(Real, Real),
    Neg(Real),
    Root(Real, u32),
    Pow(Real, u64),
    Log(Real),
    Exp(Real),
    /// Distance to the nearest integer.
    Dist(Real),
}

/// A real number given by an immutable recipe (expression DAG) that can be
/// enclosed at any working precision.
#[derive(Clone, Debug)]
pub struct Real(Arc<Node>);

/// Why a single evaluation pass could not produce an enclosure.
#[derive(Debug, Clone)]
pub(crate) enum EvalFailure {
    /// More precision might help (division by an interval containing zero, ...).
    Refine,
    /// The operation is undefined at the exact value.
    Singular(String),
}

type Memo = HashMap<usize, Interval>;

impl Real {
    fn node(n: Node) -> Self {
        Real(Arc::new(n))
    }

    pub fn rational(q: BigRational) -> Self {
        Real::node(Node::Rational(q))
    }

    pub fn int(v: impl Into<BigInt>) -> Self {
        Real::rational(BigRational::from_integer(v.into()))
    }

    pub fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Real::rational(BigRational::new(n.into(), d.into()))
    }

    pub fn pi() -> Self {
        Real::node(Node::Pi)
    }

    /// Euler's number.
    pub fn e() -> Self {
        Real::int(1).exp()
    }

    pub fn sqrt(&self) -> Self {
        self.root(2)
    }

    pub fn root(&self, n: u32) -> Self {
        assert!(n >= 1, "root index must be positive");
        if n == 1 {
            return self.clone();
        }
        Real::node(Node::Root(self.clone(), n))
    }

    pub fn powi(&self, k: u64) -> Self {
        match k {
            0 => Real::int(1),
            1 => self.clone(),
            _ => Real::node(Node::Pow(self.clone(), k)),
        }
    }

    pub fn ln(&self) -> Self {
        Real::node(Node::Log(self.clone()))
    }

    pub fn exp(&self) -> Self {
        Real::node(Node::Exp(self.clone()))
    }

    /// `||x||`, the distance from `x` to the nearest integer.
    pub fn dist_to_int(&self) -> Self {
        Real::node(Node::Dist(self.clone()))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &*self.0 {
            Node::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// Recipes built from the same nodes.
    pub fn same_recipe(&self, other: &Real) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.to_string() == other.to_string()
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub(crate) fn eval(&self, prec: u32, memo: &mut Memo) -> std::result::Result<Interval, EvalFailure> {
        if let Some(v) = memo.get(&self.key()) {
            return Ok(v.clone());
        }
        let g = prec + 8;
        let out = match &*self.0 {
            Node::Rational(q) => Interval::from_ratio(q.numer(), q.denom(), prec),
            Node::Pi => kernels::pi(prec),
            Node::Add(a, b) => a.eval(g, memo)?.add(&b.eval(g, memo)?, prec),
            Node::Sub(a, b) => a.eval(g, memo)?.sub(&b.eval(g, memo)?, prec),
            Node::Mul(a, b) => a.eval(g, memo)?.mul(&b.eval(g, memo)?, prec),
            Node::Div(a, b) => {
                let den = b.eval(g, memo)?;
                if den.is_point() && den.lo.is_zero() {
                    return Err(EvalFailure::Singular("division by zero".into()));
                }
                let num = a.eval(g, memo)?;
                num.div(&den, prec).ok_or(EvalFailure::Refine)?
            }
            Node::Neg(a) => a.eval(prec, memo)?.neg(),
            Node::Pow(a, k) => {
                let extra = 64 - k.leading_zeros();
                a.eval(g + extra, memo)?.powi(*k, prec)
            }
            Node::Root(a, n) => {
                let x = a.eval(g, memo)?;
                root_interval(&x, *n, prec)?
            }
            Node::Log(a) => {
                let x = a.eval(g, memo)?;
                if x.hi.is_negative() || (x.is_point() && x.lo.is_zero()) {
                    return Err(EvalFailure::Singular("logarithm of a nonpositive value".into()));
                }
                if !x.lo.is_positive() {
                    return Err(EvalFailure::Refine);
                }
                let lo = kernels::ln_point(&x.lo, prec).lo;
                let hi = kernels::ln_point(&x.hi, prec).hi;
                Interval::new(lo, hi)
            }
            Node::Exp(a) => {
                let x = a.eval(g + 8, memo)?;
                let lo = kernels::exp_point(&x.lo, prec).lo;
                let hi = kernels::exp_point(&x.hi, prec).hi;
                Interval::new(lo, hi)
            }
            Node::Dist(a) => {
                let x = a.eval(g, memo)?;
                dist_interval(&x, prec)
            }
        };
        memo.insert(self.key(), out.clone());
        Ok(out)
    }

    /// One evaluation pass at working precision `prec`.
    pub fn enclose(&self, prec: u32) -> Result<Interval> {
        let mut memo = Memo::new();
        match self.eval(prec, &mut memo) {
            Ok(v) => Ok(v),
            Err(EvalFailure::Refine) => Err(Error::exhausted(prec, format!("enclosing {self}"))),
            Err(EvalFailure::Singular(m)) => Err(Error::NonRefinable(m)),
        }
    }

    /// Certified enclosure at the default starting precision, refining until the
    /// first successful pass (division/log arguments separated from zero).
    pub fn certify(&self, ceiling: u32) -> Result<CertifiedReal> {
        CertifiedReal::new(self.clone(), DEFAULT_PRECISION, ceiling)
    }

    /// Enclosure whose width is at most `2^target_log2`, doubling precision as needed.
    pub fn enclose_to_width(&self, target_log2: i64, ceiling: u32) -> Result<CertifiedReal> {
        let mut c = self.certify(ceiling)?;
        loop {
            let w = c.width();
            if w.is_zero() || w.magnitude() <= target_log2 {
                return Ok(c);
            }
            if c.bits >= ceiling {
                return Err(Error::exhausted(c.bits, format!("narrowing {self} to 2^{target_log2}")));
            }
            c = c.refine((c.bits * 2).min(ceiling))?;
        }
    }
}

fn root_interval(x: &Interval, n: u32, prec: u32) -> std::result::Result<Interval, EvalFailure> {
    if n % 2 == 1 {
        let f = |d: &Dyadic| -> Interval {
            if d.is_negative() {
                kernels::root_point(&d.neg(), n, prec).neg()
            } else {
                kernels::root_point(d, n, prec)
            }
        };
        return Ok(Interval::new(f(&x.lo).lo, f(&x.hi).hi));
    }
    if x.hi.is_negative() {
        return Err(EvalFailure::Singular("even root of a negative value".into()));
    }
    let lo = if x.lo.is_negative() {
        Dyadic::zero()
    } else {
        kernels::root_point(&x.lo, n, prec).lo
    };
    let hi = kernels::root_point(&x.hi, n, prec).hi;
    Ok(Interval::new(lo, hi))
}

/// Enclosure of `||x||` for `x` in the interval; never fails, but widens to the
/// hull of the possible distances when `x` straddles an integer or a half-integer.
fn dist_interval(x: &Interval, prec: u32) -> Interval {
    let n = x.lo.floor();
    let base = Dyadic::from_bigint(n.clone());
    let one = Dyadic::one();
    let half = Dyadic::pow2(-1);
    let flo = x.lo.sub(&base);
    let fhi = x.hi.sub(&base);
    let out = if fhi <= half {
        Interval::new(flo, fhi)
    } else if flo >= half && fhi <= one {
        Interval::new(one.sub(&fhi), one.sub(&flo))
    } else if flo >= half && fhi <= one.add(&half) {
        // straddles the integer n+1
        let a = one.sub(&flo);
        let b = fhi.sub(&one);
        Interval::new(Dyadic::zero(), a.max(b))
    } else if fhi <= one {
        // straddles n + 1/2
        let m = flo.min(one.sub(&fhi));
        Interval::new(m, half)
    } else {
        Interval::new(Dyadic::zero(), half)
    };
    out.round(prec)
}

/// A real number together with a certified enclosure `[lower, upper]` and the
/// recipe that recomputes it at any precision.
#[derive(Clone, Debug)]
pub struct CertifiedReal {
    expr: Real,
    enclosure: Interval,
    bits: u32,
    ceiling: u32,
}

impl CertifiedReal {
    /// First successful enclosure at or above `start` bits.
    pub fn new(expr: Real, start: u32, ceiling: u32) -> Result<Self> {
        let mut bits = start.max(2);
        loop {
            let mut memo = Memo::new();
            match expr.eval(bits, &mut memo) {
                Ok(enclosure) => {
                    return Ok(CertifiedReal {
                        expr,
                        enclosure,
                        bits,
                        ceiling,
                    })
                }
                Err(EvalFailure::Singular(m)) => return Err(Error::NonRefinable(m)),
                Err(EvalFailure::Refine) => {
                    if bits >= ceiling {
                        return Err(Error::exhausted(bits, format!("enclosing {expr}")));
                    }
                    bits = (bits * 2).min(ceiling);
                }
            }
        }
    }

    pub fn expr(&self) -> &Real {
        &self.expr
    }

    pub fn lower(&self) -> &Dyadic {
        &self.enclosure.lo
    }

    pub fn upper(&self) -> &Dyadic {
        &self.enclosure.hi
    }

    pub fn interval(&self) -> &Interval {
        &self.enclosure
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn ceiling(&self) -> u32 {
        self.ceiling
    }

    pub fn width(&self) -> Dyadic {
        self.enclosure.width()
    }

    /// Recompute at `bits` and intersect with the current enclosure; never widens.
    pub fn refine(&self, bits: u32) -> Result<Self> {
        if bits <= self.bits {
            return Ok(self.clone());
        }
        let fresh = CertifiedReal::new(self.expr.clone(), bits, self.ceiling.max(bits))?;
        let enclosure = self
            .enclosure
            .intersect(&fresh.enclosure)
            .ok_or_else(|| Error::NonRefinable(format!("disjoint enclosures for {}", self.expr)))?;
        Ok(CertifiedReal {
            expr: self.expr.clone(),
            enclosure,
            bits: fresh.bits,
            ceiling: self.ceiling,
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure.midpoint().to_f64()
    }

    /// Decimal digits after the point that are certified (lower and upper agree).
    pub fn certified_decimal(&self, digits: u32) -> Option<String> {
        let lo = self.enclosure.lo.to_decimal_floor(digits);
        let hi = self.enclosure.hi.to_decimal_floor(digits);
        (lo == hi).then_some(lo)
    }
}

/// Three-valued answer of a certified comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    /// Could not decide; carries the final enclosure width of the difference.
    Unknown(Dyadic),
}

impl Verdict {
    pub fn is_true(&self) -> bool {
        matches!(self, Verdict::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Verdict::False)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

/// Sign of `x` after refinement, `None` if it straddles zero at the ceiling.
pub fn certified_sign(x: &Real, max_bits: u32) -> Result<(Option<i32>, Dyadic)> {
    if let Some(q) = x.as_rational() {
        let s = if q.is_zero() {
            0
        } else if q.is_positive() {
            1
        } else {
            -1
        };
        return Ok((Some(s), Dyadic::zero()));
    }
    let mut c = CertifiedReal::new(x.clone(), DEFAULT_PRECISION.min(max_bits), max_bits)?;
    loop {
        let iv = c.interval();
        if iv.lo.is_positive() {
            return Ok((Some(1), c.width()));
        }
        if iv.hi.is_negative() {
            return Ok((Some(-1), c.width()));
        }
        if iv.is_point() {
            return Ok((Some(0), Dyadic::zero()));
        }
        if c.bits() >= max_bits {
            return Ok((None, c.width()));
        }
        c = c.refine((c.bits() * 2).min(max_bits))?;
    }
}

/// `True` iff `a > b` provably, `False` iff `a <= b` provably.
pub fn compare(a: &Real, b: &Real, max_bits: u32) -> Result<Verdict> {
    if a.same_recipe(b) {
        return Ok(Verdict::False);
    }
    let diff = a - b;
    let (sign, width) = certified_sign(&diff, max_bits)?;
    Ok(match sign {
        Some(1) => Verdict::True,
        Some(_) => Verdict::False,
        None => Verdict::Unknown(width),
    })
}

/// Enclosure of `||x||`, refined until its width is below `2^-(bits/2)` or the ceiling is hit.
pub fn nearest_integer_distance(x: &Real, max_bits: u32) -> Result<CertifiedReal> {
    let d = x.dist_to_int();
    let mut c = CertifiedReal::new(d, DEFAULT_PRECISION.min(max_bits), max_bits)?;
    loop {
        let w = c.width();
        let target = -(c.bits() as i64) / 2;
        if w.is_zero() || w.magnitude() <= target || c.bits() >= max_bits {
            return Ok(c);
        }
        c = c.refine((c.bits() * 2).min(max_bits))?;
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $node:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real::node(Node::$node(self.clone(), rhs.clone()))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real::node(Node::$node(self, rhs))
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real::node(Node::$node(self, rhs.clone()))
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real::node(Node::$node(self.clone(), rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::node(Node::Neg(self))
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::node(Node::Neg(self.clone()))
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Self {
        Real::int(v)
    }
}

impl From<BigInt> for Real {
    fn from(v: BigInt) -> Self {
        Real::int(v)
    }
}

impl From<BigRational> for Real {
    fn from(q: BigRational) -> Self {
        Real::rational(q)
    }
}

/// Renders the recipe in the syntax accepted by [`super::parse_expr`].
impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Rational(q) => {
                if q.denom().is_one() {
                    if q.numer().is_negative() {
                        write!(f, "({})", q.numer())
                    } else {
                        write!(f, "{}", q.numer())
                    }
                } else {
                    write!(f, "({}/{})", q.numer(), q.denom())
                }
            }
            Node::Pi => write!(f, "pi"),
            Node::Add(a, b) => write!(f, "({a}+{b})"),
            Node::Sub(a, b) => write!(f, "({a}-{b})"),
            Node::Mul(a, b) => write!(f, "({a}*{b})"),
            Node::Div(a, b) => write!(f, "({a}/{b})"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Root(a, 2) => write!(f, "sqrt({a})"),
            Node::Root(a, n) => write!(f, "root({a},{n})"),
            Node::Pow(a, k) => write!(f, "({a}^{k})"),
            Node::Log(a) => write!(f, "log({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Dist(a) => write!(f, "dist({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_never_widens() {
        let x = Real::int(2).sqrt() + Real::pi().ln();
        let c = x.certify(4096).unwrap();
        let mut prev = c.width();
        let mut cur = c;
        for bits in [256, 512, 1024] {
            cur = cur.refine(bits).unwrap();
            assert!(cur.width() <= prev);
            prev = cur.width();
        }
        assert!(prev.magnitude() < -1000);
    }

    #[test]
    fn log_of_zero_is_singular() {
        let err = Real::int(0).ln().certify(1024).unwrap_err();
        assert!(matches!(err, Error::NonRefinable(_)));
    }

    #[test]
    fn division_by_vanishing_expression_exhausts() {
        let zero = Real::int(2).sqrt() * Real::int(2).sqrt() - Real::int(2);
        let err = (Real::int(1) / zero).certify(512).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { .. }));
    }

    #[test]
    fn compare_pi_with_355_113() {
        let v = compare(&Real::pi(), &Real::ratio(355, 113), 4096).unwrap();
        assert_eq!(v, Verdict::False);
        let v = compare(&Real::ratio(355, 113), &Real::pi(), 4096).unwrap();
        assert_eq!(v, Verdict::True);
    }

    #[test]
    fn compare_reflexive_short_circuit() {
        let x = Real::int(3).root(3);
        assert_eq!(compare(&x, &x, 1024).unwrap(), Verdict::False);
        let y = Real::int(3).root(3);
        assert_eq!(compare(&x, &y, 1024).unwrap(), Verdict::False);
    }

    #[test]
    fn undecidable_equality_is_unknown() {
        let a = Real::int(2).sqrt() * Real::int(3).sqrt();
        let b = Real::int(6).sqrt();
        assert!(matches!(compare(&a, &b, 512).unwrap(), Verdict::Unknown(_)));
    }

    #[test]
    fn dist_examples() {
        let d = nearest_integer_distance(&Real::ratio(13, 4), 256).unwrap();
        assert!(d.interval().is_point());
        assert_eq!(d.lower(), &Dyadic::pow2(-2));
        let d = nearest_integer_distance(&(Real::int(113) * Real::pi()), 512).unwrap();
        let v = d.to_f64();
        assert!((v - 3.014435e-5).abs() < 1e-9, "{v}");
        let d = nearest_integer_distance(&Real::ratio(3, 2).powi(5), 256).unwrap();
        assert_eq!(d.lower(), &Dyadic::new(BigInt::from(13), -5));
    }

    #[test]
    fn display_round_trips_through_parser() {
        let x = (Real::int(1) + Real::int(5).sqrt()) / Real::int(2) - Real::ratio(-3, 7).exp();
        let parsed = crate::numeric::parse_expr(&x.to_string()).unwrap();
        assert_eq!(parsed.to_string(), x.to_string());
    }
}
