//! Regular continued fractions, convergents, Dirichlet approximation and Pell's equation.
//!
//! Partial quotients of an irrational are certified one at a time: the complete
//! quotient is a Möbius image of the enclosure of `x`, and a quotient is emitted
//! only when both endpoint images have the same floor. Otherwise the enclosure is
//! recomputed at twice the precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{CertifiedReal, Dyadic, Real, DEFAULT_PRECISION};

/// Partial quotients `[a0; a1, a2, ...]` with their convergents `p_i / q_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    quotients: Vec<BigInt>,
    convergents: Vec<(BigInt, BigInt)>,
    /// The expansion terminated because the input is rational.
    terminated: bool,
}

impl ContinuedFraction {
    fn from_quotients(quotients: Vec<BigInt>, terminated: bool) -> Self {
        let mut convergents = Vec::with_capacity(quotients.len());
        let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        for a in &quotients {
            let p = a * &p1 + &p2;
            let q = a * &q1 + &q2;
            convergents.push((p.clone(), q.clone()));
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
        }
        ContinuedFraction {
            quotients,
            convergents,
            terminated,
        }
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// Folds the quotients back into the last convergent as an exact rational.
    pub fn value(&self) -> Option<BigRational> {
        self.convergents
            .last()
            .map(|(p, q)| BigRational::new(p.clone(), q.clone()))
    }
}

#[derive(Serialize)]
struct CfJson {
    quotients: Vec<String>,
    convergents: Vec<[String; 2]>,
}

impl ContinuedFraction {
    /// `{"quotients":[...],"convergents":[["p","q"],...]}` with decimal-string integers.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CfJson {
            quotients: self.quotients.iter().map(|a| a.to_string()).collect(),
            convergents: self
                .convergents
                .iter()
                .map(|(p, q)| [p.to_string(), q.to_string()])
                .collect(),
        })
        .expect("serializable")
    }
}

/// Lazily produces certified partial quotients of a real number.
#[derive(Clone, Debug)]
pub struct Expander {
    source: Source,
    quotients: Vec<BigInt>,
    // last two convergents (p_{n-1}, q_{n-1}), (p_{n-2}, q_{n-2})
    p1: BigInt,
    q1: BigInt,
    p2: BigInt,
    q2: BigInt,
    done: bool,
}

#[derive(Clone, Debug)]
enum Source {
    Exact { num: BigInt, den: BigInt },
    Interval(CertifiedReal),
}

impl Expander {
    pub fn new(x: &Real, ceiling: u32) -> Result<Self> {
        let source = match x.as_rational() {
            Some(q) => Source::Exact {
                num: q.numer().clone(),
                den: q.denom().clone(),
            },
            None => Source::Interval(CertifiedReal::new(x.clone(), DEFAULT_PRECISION, ceiling)?),
        };
        Ok(Expander {
            source,
            quotients: Vec::new(),
            p1: BigInt::one(),
            q1: BigInt::zero(),
            p2: BigInt::zero(),
            q2: BigInt::one(),
            done: false,
        })
    }

    pub fn rational(q: &BigRational) -> Self {
        Expander {
            source: Source::Exact {
                num: q.numer().clone(),
                den: q.denom().clone(),
            },
            quotients: Vec::new(),
            p1: BigInt::one(),
            q1: BigInt::zero(),
            p2: BigInt::zero(),
            q2: BigInt::one(),
            done: false,
        }
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    /// Last emitted convergent.
    pub fn convergent(&self) -> Option<(BigInt, BigInt)> {
        (!self.quotients.is_empty()).then(|| (self.p1.clone(), self.q1.clone()))
    }

    /// Next certified partial quotient, `None` once a rational input is exhausted.
    pub fn next_quotient(&mut self) -> Result<Option<BigInt>> {
        if self.done {
            return Ok(None);
        }
        let a = match &mut self.source {
            Source::Exact { num, den } => {
                if den.is_zero() {
                    self.done = true;
                    return Ok(None);
                }
                let (a, r) = num.div_mod_floor(den);
                let old_den = std::mem::replace(den, r);
                *num = old_den;
                a
            }
            Source::Interval(c) => {
                let mut c = c.clone();
                loop {
                    if c.interval().is_point() {
                        // the value is an exact dyadic: finish with Euclid on the remainder
                        let (n, d) = c.lower().to_ratio();
                        let (num, den) = self.complete_quotient_exact(&n, &d);
                        self.source = Source::Exact { num, den };
                        return self.next_quotient();
                    }
                    if let Some(a) = self.try_certify(c.lower(), c.upper()) {
                        self.source = Source::Interval(c);
                        break a;
                    }
                    if c.bits() >= c.ceiling() {
                        return Err(Error::exhausted(
                            c.bits(),
                            format!("certifying partial quotient {} of {}", self.quotients.len(), c.expr()),
                        ));
                    }
                    let next = (c.bits() * 2).min(c.ceiling());
                    c = c.refine(next)?;
                }
            }
        };
        self.push(a.clone());
        Ok(Some(a))
    }

    fn push(&mut self, a: BigInt) {
        let p = &a * &self.p1 + &self.p2;
        let q = &a * &self.q1 + &self.q2;
        self.p2 = std::mem::replace(&mut self.p1, p);
        self.q2 = std::mem::replace(&mut self.q1, q);
        self.quotients.push(a);
    }

    /// Complete quotient `-(q_{n-2} x - p_{n-2}) / (q_{n-1} x - p_{n-1})` at the exact value `n/d`.
    fn complete_quotient_exact(&self, n: &BigInt, d: &BigInt) -> (BigInt, BigInt) {
        let num = &self.p2 * d - &self.q2 * n;
        let den = &self.q1 * n - &self.p1 * d;
        if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        }
    }

    fn try_certify(&self, lo: &Dyadic, hi: &Dyadic) -> Option<BigInt> {
        let mut floors = Vec::with_capacity(2);
        let mut den_signs = Vec::with_capacity(2);
        for t in [lo, hi] {
            let (n, d) = t.to_ratio();
            let num = &self.p2 * &d - &self.q2 * &n;
            let den = &self.q1 * &n - &self.p1 * &d;
            if den.is_zero() {
                return None;
            }
            den_signs.push(den.is_positive());
            floors.push(num.div_floor(&den));
        }
        if den_signs[0] != den_signs[1] || floors[0] != floors[1] {
            return None;
        }
        let a = floors.pop()?;
        if !self.quotients.is_empty() && a < BigInt::one() {
            return None;
        }
        Some(a)
    }

    pub fn into_continued_fraction(self) -> ContinuedFraction {
        let done = self.done;
        ContinuedFraction::from_quotients(self.quotients, done)
    }
}

/// First `count` certified partial quotients of `x` (fewer if `x` is rational).
pub fn expand(x: &Real, count: usize, ceiling: u32) -> Result<ContinuedFraction> {
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let mut ex = Expander::new(x, ceiling)?;
    for _ in 0..count {
        if ex.next_quotient()?.is_none() {
            break;
        }
    }
    Ok(ex.into_continued_fraction())
}

/// Exact expansion of a rational.
pub fn expand_rational(q: &BigRational) -> ContinuedFraction {
    let mut ex = Expander::rational(q);
    while let Ok(Some(_)) = ex.next_quotient() {}
    ex.into_continued_fraction()
}

/// All convergents with `q <= 10^q_max_log10`.
pub fn convergents_up_to(x: &Real, q_max_log10: u32, ceiling: u32) -> Result<Vec<(BigInt, BigInt)>> {
    let limit = num_traits::pow(BigInt::from(10), q_max_log10 as usize);
    convergents_below(x, &limit, ceiling)
}

/// All convergents with `q <= limit`.
pub fn convergents_below(x: &Real, limit: &BigInt, ceiling: u32) -> Result<Vec<(BigInt, BigInt)>> {
    let mut ex = Expander::new(x, ceiling)?;
    let mut out = Vec::new();
    while ex.next_quotient()?.is_some() {
        let (p, q) = ex.convergent().expect("just pushed");
        if &q > limit {
            break;
        }
        out.push((p, q));
    }
    Ok(out)
}

/// `(p, q)` with `1 <= q <= Q` and `|q x - p| <= 1/Q`, taken from the convergent ladder.
pub fn dirichlet_approx(x: &Real, big_q: &BigInt, ceiling: u32) -> Result<(BigInt, BigInt)> {
    if big_q < &BigInt::one() {
        return Err(Error::invalid("Q must be at least 1"));
    }
    let mut ex = Expander::new(x, ceiling)?;
    let mut best: Option<(BigInt, BigInt)> = None;
    while ex.next_quotient()?.is_some() {
        let (p, q) = ex.convergent().expect("just pushed");
        if &q > big_q {
            break;
        }
        best = Some((p, q));
    }
    best.ok_or_else(|| Error::invalid("no convergent with q <= Q"))
}

/// A solution of `x^2 - d y^2 = 1` with `x, y > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSolution {
    pub x: BigInt,
    pub y: BigInt,
    pub d: BigInt,
    pub fundamental: bool,
    /// Period length of the continued fraction of `sqrt(d)`.
    pub period: usize,
}

impl PellSolution {
    pub fn verify(&self) -> bool {
        &self.x * &self.x - &self.d * &self.y * &self.y == BigInt::one()
    }

    /// The `k`-th solution `(x + y sqrt d)^k`.
    pub fn power(&self, k: u32) -> (BigInt, BigInt) {
        let (mut x, mut y) = (BigInt::one(), BigInt::zero());
        for _ in 0..k {
            let nx = &x * &self.x + &self.d * &y * &self.y;
            let ny = &x * &self.y + &y * &self.x;
            x = nx;
            y = ny;
        }
        (x, y)
    }
}

/// Fundamental solution of Pell's equation from the period of `sqrt(d)`, computed
/// with the exact `(P, Q)` recurrence.
pub fn solve_pell(d: &BigInt) -> Result<PellSolution> {
    if d < &BigInt::from(2) {
        return Err(Error::invalid("d must be at least 2"));
    }
    let a0 = d.sqrt();
    if &a0 * &a0 == *d {
        return Err(Error::NotApplicable(format!("{d} is a perfect square")));
    }
    let two_a0 = &a0 * 2u32;
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p2, mut q2) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (a0.clone(), BigInt::one());
    let mut index = 0usize;
    let mut period = 0usize;
    loop {
        // convergent `index` is (p1, q1)
        m = &den * &a - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        if period == 0 && a == two_a0 {
            period = index + 1;
        }
        if period != 0 && (index + 1).is_multiple_of(period) {
            let x = p1.clone();
            let y = q1.clone();
            if &x * &x - d * &y * &y == BigInt::one() {
                return Ok(PellSolution {
                    x,
                    y,
                    d: d.clone(),
                    fundamental: true,
                    period,
                });
            }
        }
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
        index += 1;
    }
}

/// The cattle problem's `d`; its fundamental solution has over 100,000 digits.
pub const ARCHIMEDES_D: &str = "410286423278424";

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn quotients(cf: &ContinuedFraction) -> Vec<i64> {
        cf.quotients().iter().map(|a| a.to_string().parse().unwrap()).collect()
    }

    #[test]
    fn expands_rationals_exactly() {
        let cf = expand(&Real::ratio(355, 113), 10, 1 << 12).unwrap();
        assert_eq!(quotients(&cf), vec![3, 7, 16]);
        assert!(cf.is_terminated());
        assert_eq!(cf.value().unwrap(), BigRational::new(big(355), big(113)));
        let cf = expand(&Real::ratio(-7, 3), 10, 1 << 12).unwrap();
        assert_eq!(quotients(&cf), vec![-3, 1, 2]);
    }

    #[test]
    fn expands_irrationals() {
        let cf = expand(&Real::pi(), 5, 1 << 12).unwrap();
        assert_eq!(quotients(&cf), vec![3, 7, 15, 1, 292]);
        let phi = (Real::int(1) + Real::int(5).sqrt()) / Real::int(2);
        let cf = expand(&phi, 6, 1 << 12).unwrap();
        assert_eq!(quotients(&cf), vec![1; 6]);
        let cf = expand(&Real::int(2).root(3), 7, 1 << 12).unwrap();
        assert_eq!(quotients(&cf), vec![1, 3, 1, 5, 1, 1, 4]);
    }

    #[test]
    fn exact_dyadic_enclosures_terminate() {
        let cf = expand(&Real::int(4).sqrt(), 5, 1 << 12).unwrap();
        assert_eq!(quotients(&cf), vec![2]);
        let cf = expand(&(Real::int(9).sqrt() / Real::int(4)), 5, 1 << 12).unwrap();
        assert_eq!(quotients(&cf), vec![0, 1, 3]);
    }

    #[test]
    fn long_expansion_needs_refinement() {
        let cf = expand(&Real::int(2).root(3), 300, 1 << 14).unwrap();
        assert_eq!(cf.len(), 300);
        let conv = cf.convergents();
        for w in conv.windows(2) {
            let det = &w[1].0 * &w[0].1 - &w[0].0 * &w[1].1;
            assert_eq!(det.abs(), BigInt::one());
        }
    }

    #[test]
    fn precision_ceiling_is_reported() {
        let zero = Real::int(2).sqrt() * Real::int(2).sqrt();
        let err = expand(&zero, 3, 512).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { .. }), "{err:?}");
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(
            dirichlet_approx(&Real::pi(), &big(113), 4096).unwrap(),
            (big(355), big(113))
        );
        assert_eq!(
            dirichlet_approx(&Real::ratio(1, 2), &big(10), 4096).unwrap(),
            (big(1), big(2))
        );
        let phi = (Real::int(1) + Real::int(5).sqrt()) / Real::int(2);
        assert_eq!(dirichlet_approx(&phi, &big(100), 4096).unwrap(), (big(144), big(89)));
        assert!(dirichlet_approx(&phi, &big(0), 4096).is_err());
    }

    #[test]
    fn convergent_filtering() {
        let c = convergents_up_to(&Real::int(2).root(3), 2, 4096).unwrap();
        assert!(c.contains(&(big(5), big(4))));
        assert!(c.contains(&(big(63), big(50))));
        assert!(c.iter().all(|(_, q)| q <= &big(100)));
        let c = convergents_up_to(&Real::ratio(355, 113), 3, 4096).unwrap();
        assert_eq!(c.last().unwrap(), &(big(355), big(113)));
    }

    #[test]
    fn pell_small_cases() {
        let cases = [
            (2, 3, 2),
            (3, 2, 1),
            (8, 3, 1),
            (13, 649, 180),
            (61, 1766319049, 226153980),
        ];
        for (d, x, y) in cases {
            let s = solve_pell(&big(d)).unwrap();
            assert_eq!((s.x.clone(), s.y.clone()), (big(x), big(y)), "d={d}");
            assert!(s.verify());
        }
        assert!(matches!(solve_pell(&big(16)), Err(Error::NotApplicable(_))));
        assert!(solve_pell(&big(1)).is_err());
    }

    #[test]
    fn pell_powers_stay_on_the_curve() {
        let s = solve_pell(&big(7)).unwrap();
        for k in 0..6 {
            let (x, y) = s.power(k);
            assert_eq!(&x * &x - big(7) * &y * &y, BigInt::one());
        }
    }
}
