//! Baker–Davenport reduction.
//!
//! Given `|r theta - s + phi| < A * C^(-r)` for all solutions with `r <= R`, a
//! convergent denominator `q` of `theta` with `||q theta|| <= 1/(K R)` and
//! `||q phi|| >= 2/K` forces `C^r < q K A`. The new bound is logarithmic in `R`
//! and the step can be repeated.
//!
//! For the homogeneous case `phi = 0` the same role is played by the
//! best-approximation property of convergents: if `q_{n+1} > R` then
//! `||r theta|| >= ||q_n theta||` for every `0 < r <= R`, so
//! `C^r < A / ||q_n theta||`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::contfrac::Expander;
use crate::error::{Error, Result};
use crate::numeric::{compare, parse_expr, parse_rational, Dyadic, Interval, Real, Verdict};

/// Instance of `|r theta - s + phi| < mult * base^(-r)`, `0 <= r <= bound`.
#[derive(Clone, Debug)]
pub struct ReductionProblem {
    pub theta: Real,
    pub phi: Real,
    pub mult: BigRational,
    pub base: BigRational,
    pub bound: BigInt,
    pub ceiling: u32,
}

impl ReductionProblem {
    pub fn new(theta: Real, phi: Real, mult: BigRational, base: BigRational, bound: BigInt) -> Result<Self> {
        if mult < BigRational::one() {
            return Err(Error::invalid(format!("multiplier A = {mult} must be at least 1")));
        }
        if base <= BigRational::one() {
            return Err(Error::invalid(format!("base C = {base} must exceed 1")));
        }
        if bound < BigInt::one() {
            return Err(Error::invalid("bound R must be at least 1"));
        }
        Ok(ReductionProblem {
            theta,
            phi,
            mult,
            base,
            bound,
            ceiling: 1 << 16,
        })
    }

    /// `R = ceil(10^log10_bound)`.
    pub fn from_log10(
        theta: Real,
        phi: Real,
        mult: BigRational,
        base: BigRational,
        log10_bound: &BigRational,
    ) -> Result<Self> {
        ReductionProblem::new(theta, phi, mult, base, pow10_ceil(log10_bound)?)
    }

    pub fn with_ceiling(mut self, ceiling: u32) -> Self {
        self.ceiling = ceiling;
        self
    }

    fn with_bound(&self, bound: BigInt) -> Self {
        ReductionProblem { bound, ..self.clone() }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.phi.as_rational().is_some_and(|q| q.is_zero())
    }
}

/// `ceil(10^x)` for a nonnegative rational `x`.
pub fn pow10_ceil(x: &BigRational) -> Result<BigInt> {
    if x.is_negative() {
        return Err(Error::invalid("log10 bound must be nonnegative"));
    }
    let den = x
        .denom()
        .to_u32()
        .ok_or_else(|| Error::invalid("log10 bound denominator too large"))?;
    let num = x
        .numer()
        .to_usize()
        .ok_or_else(|| Error::invalid("log10 bound too large"))?;
    if num / den as usize > 1_000_000 {
        return Err(Error::invalid("log10 bound exceeds 10^6 digits"));
    }
    let big = num_traits::pow(BigInt::from(10), num);
    let r = big.nth_root(den);
    Ok(if num_traits::pow(r.clone(), den as usize) == big {
        r
    } else {
        r + 1u32
    })
}

/// Largest `N >= 0` with `base^N < target`, or `None` when `target <= 1`.
pub fn max_power_below(base: &BigRational, target: &BigRational) -> Option<BigInt> {
    if target <= &BigRational::one() {
        return None;
    }
    let lg = |q: &BigRational| -> f64 {
        let ln = |b: &BigInt| -> f64 {
            let bits = b.bits();
            let shift = bits.saturating_sub(60);
            (b >> shift).to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
        };
        ln(q.numer()) - ln(q.denom())
    };
    let est = (lg(target) / lg(base)).floor().max(0.0) as u64;
    let pow = |n: u64| num_traits::pow(base.clone(), n as usize);
    let mut n = est;
    while n > 0 && &pow(n) >= target {
        n -= 1;
    }
    while &pow(n + 1) < target {
        n += 1;
    }
    Some(BigInt::from(n))
}

/// Witness of one reduction step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub theta: String,
    pub phi: String,
    pub mult: BigRational,
    pub base: BigRational,
    pub q: BigInt,
    pub q_theta_dist: Interval,
    pub q_phi_dist: Interval,
    pub k: BigInt,
    pub old_bound: BigInt,
    pub new_bound: BigInt,
    /// For the homogeneous variant: the next convergent denominator `q_{n+1} > R`.
    pub next_q: Option<BigInt>,
}

fn iv_json(iv: &Interval) -> serde_json::Value {
    json!([iv.lo.to_string(), iv.hi.to_string()])
}

fn iv_from_json(v: &serde_json::Value) -> Result<Interval> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse("interval".into()))?;
    let lo: Dyadic = arr[0]
        .as_str()
        .ok_or_else(|| Error::Parse("interval".into()))?
        .parse()?;
    let hi: Dyadic = arr[1]
        .as_str()
        .ok_or_else(|| Error::Parse("interval".into()))?
        .parse()?;
    if lo > hi {
        return Err(Error::Parse("inverted interval".into()));
    }
    Ok(Interval::new(lo, hi))
}

impl ReductionCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "kind": if self.next_q.is_some() { "homogeneous" } else { "baker-davenport" },
            "theta": self.theta,
            "phi": self.phi,
            "A": self.mult.to_string(),
            "C": self.base.to_string(),
            "R": self.old_bound.to_string(),
            "K": self.k.to_string(),
            "q": self.q.to_string(),
            "q_theta_dist": iv_json(&self.q_theta_dist),
            "q_phi_dist": iv_json(&self.q_phi_dist),
            "new_bound": self.new_bound.to_string(),
        });
        if let Some(nq) = &self.next_q {
            v["next_q"] = json!(nq.to_string());
        }
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let s = |k: &str| -> Result<&str> {
            v.get(k)
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Parse(format!("certificate field {k:?} missing")))
        };
        let int = |k: &str| -> Result<BigInt> {
            s(k)?
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("certificate field {k:?} is not an integer")))
        };
        Ok(ReductionCertificate {
            theta: s("theta")?.to_string(),
            phi: s("phi")?.to_string(),
            mult: parse_rational(s("A")?)?,
            base: parse_rational(s("C")?)?,
            q: int("q")?,
            q_theta_dist: iv_from_json(&v["q_theta_dist"])?,
            q_phi_dist: iv_from_json(&v["q_phi_dist"])?,
            k: int("K")?,
            old_bound: int("R")?,
            new_bound: int("new_bound")?,
            next_q: match v.get("next_q") {
                Some(x) => Some(
                    x.as_str()
                        .and_then(|x| x.parse().ok())
                        .ok_or_else(|| Error::Parse("next_q".into()))?,
                ),
                None => None,
            },
        })
    }

    /// Replays the certificate with fresh interval arithmetic.
    pub fn verify(&self, ceiling: u32) -> Result<()> {
        let fail = |m: String| Err(Error::Verification(m));
        let theta = parse_expr(&self.theta)?;
        let phi = parse_expr(&self.phi)?;
        if self.q < BigInt::one() || self.old_bound < BigInt::one() {
            return fail("q and R must be positive".into());
        }
        let q = Real::int(self.q.clone());
        let qt = (&q * &theta).dist_to_int();
        let scale = self.next_q.as_ref().unwrap_or(&self.q).bits() as i64;
        let fresh_qt = qt.enclose_to_width(-scale - 40, ceiling)?;
        if fresh_qt.interval().intersect(&self.q_theta_dist).is_none() {
            return fail("stored ||q theta|| enclosure does not match a fresh evaluation".into());
        }
        match &self.next_q {
            None => {
                if self.k < BigInt::from(2) {
                    return fail("K must be at least 2".into());
                }
                let limit = Real::rational(BigRational::new(BigInt::one(), &self.k * &self.old_bound));
                if !limit_ge(&limit, &qt, ceiling)? {
                    return fail(format!("||q theta|| <= 1/(K R) is not certified for q = {}", self.q));
                }
                let qp = (&q * &phi).dist_to_int();
                let fresh_qp = qp.certify(ceiling)?;
                if fresh_qp.interval().intersect(&self.q_phi_dist).is_none() {
                    return fail("stored ||q phi|| enclosure does not match a fresh evaluation".into());
                }
                let two_over_k = Real::rational(BigRational::new(BigInt::from(2), self.k.clone()));
                if !limit_ge(&qp, &two_over_k, ceiling)? {
                    return fail(format!("||q phi|| >= 2/K is not certified for q = {}", self.q));
                }
                let target = BigRational::from_integer(&self.q * &self.k) * &self.mult;
                check_new_bound(&self.base, &target, &self.new_bound)
            }
            Some(next_q) => {
                if next_q <= &self.old_bound {
                    return fail("next convergent denominator must exceed R".into());
                }
                if !consecutive_convergents(&theta, &self.q, next_q, ceiling)? {
                    return fail(format!(
                        "{} and {next_q} are not consecutive convergent denominators",
                        self.q
                    ));
                }
                let lo = fresh_qt.lower();
                if !lo.is_positive() {
                    return fail("||q theta|| is not certified positive".into());
                }
                let (n, d) = lo.to_ratio();
                let target = &self.mult * BigRational::new(d, n);
                check_new_bound(&self.base, &target, &self.new_bound)
            }
        }
    }
}

/// `a >= b` certified.
fn limit_ge(a: &Real, b: &Real, ceiling: u32) -> Result<bool> {
    Ok(compare(b, a, ceiling)?.is_false())
}

fn check_new_bound(base: &BigRational, target: &BigRational, claimed: &BigInt) -> Result<()> {
    // every r > claimed must violate C^r < target, i.e. C^(claimed+1) >= target
    let n = claimed
        .to_usize()
        .ok_or_else(|| Error::Verification("new bound out of range".into()))?;
    if claimed.is_negative() || &num_traits::pow(base.clone(), n + 1) < target {
        return Err(Error::Verification(format!(
            "C^(new_bound + 1) >= q K A fails for new_bound = {claimed}"
        )));
    }
    Ok(())
}

fn consecutive_convergents(theta: &Real, q: &BigInt, next_q: &BigInt, ceiling: u32) -> Result<bool> {
    let mut ex = Expander::new(theta, ceiling)?;
    let mut prev: Option<BigInt> = None;
    while ex.next_quotient()?.is_some() {
        let (_, qi) = ex.convergent().expect("just pushed");
        if &qi > next_q {
            return Ok(false);
        }
        if &qi == next_q {
            return Ok(prev.as_ref() == Some(q));
        }
        prev = Some(qi);
    }
    Ok(false)
}

/// How many convergents past the first admissible one to try for a given `K`.
const CANDIDATES_PER_K: usize = 4;

/// One Baker–Davenport step with a fixed `K`.
pub fn reduce_once(prob: &ReductionProblem, k: &BigInt) -> Result<ReductionCertificate> {
    if k < &BigInt::from(2) {
        return Err(Error::invalid("K must be at least 2"));
    }
    if prob.is_homogeneous() {
        return Err(Error::SmallQPhi {
            q: "any".into(),
            k: k.to_string(),
        });
    }
    let kr = k * &prob.bound;
    let mut ex = Expander::new(&prob.theta, prob.ceiling)?;
    // advance until the next denominator exceeds K R; then q_i has ||q_i theta|| < 1/(K R)
    let mut candidates: Vec<BigInt> = Vec::new();
    let mut prev_q: Option<BigInt> = None;
    while candidates.len() < CANDIDATES_PER_K {
        if ex.next_quotient()?.is_none() {
            return Err(Error::NotApplicable("theta is rational".into()));
        }
        let (_, qi) = ex.convergent().expect("just pushed");
        if qi > kr {
            if let Some(p) = prev_q.take() {
                candidates.push(p);
            }
        }
        prev_q = Some(qi);
    }
    let limit = Real::rational(BigRational::new(BigInt::one(), kr.clone()));
    let two_over_k = Real::rational(BigRational::new(BigInt::from(2), k.clone()));
    let mut last_err = None;
    for q in candidates {
        let qr = Real::int(q.clone());
        let qt = (&qr * &prob.theta).dist_to_int();
        if !limit_ge(&limit, &qt, prob.ceiling)? {
            continue;
        }
        let qp = (&qr * &prob.phi).dist_to_int();
        match compare(&two_over_k, &qp, prob.ceiling)? {
            Verdict::False => {}
            _ => {
                last_err = Some(Error::SmallQPhi {
                    q: q.to_string(),
                    k: k.to_string(),
                });
                continue;
            }
        }
        let target = BigRational::from_integer(&q * k) * &prob.mult;
        let new_bound = max_power_below(&prob.base, &target).unwrap_or_default();
        let qt_c = qt
            .enclose_to_width(-64, prob.ceiling)
            .or_else(|_| qt.certify(prob.ceiling))?;
        let qp_c = qp
            .enclose_to_width(-64, prob.ceiling)
            .or_else(|_| qp.certify(prob.ceiling))?;
        return Ok(ReductionCertificate {
            theta: prob.theta.to_string(),
            phi: prob.phi.to_string(),
            mult: prob.mult.clone(),
            base: prob.base.clone(),
            q,
            q_theta_dist: qt_c.interval().clone(),
            q_phi_dist: qp_c.interval().clone(),
            k: k.clone(),
            old_bound: prob.bound.clone(),
            new_bound,
            next_q: None,
        });
    }
    Err(last_err.unwrap_or_else(|| Error::exhausted(prob.ceiling, "certifying ||q theta|| <= 1/(K R)")))
}

/// One homogeneous step: `q = q_n` with `q_{n+1} > R`.
pub fn reduce_homogeneous_once(prob: &ReductionProblem) -> Result<ReductionCertificate> {
    let mut ex = Expander::new(&prob.theta, prob.ceiling)?;
    let mut prev: Option<BigInt> = None;
    let (q, next_q) = loop {
        if ex.next_quotient()?.is_none() {
            return Err(Error::NotApplicable("theta is rational".into()));
        }
        let (_, qi) = ex.convergent().expect("just pushed");
        if qi > prob.bound {
            match prev {
                Some(p) => break (p, qi),
                None => return Err(Error::NotApplicable("bound is below the first convergent".into())),
            }
        }
        prev = Some(qi);
    };
    let qt = (Real::int(q.clone()) * &prob.theta).dist_to_int();
    let c = qt.enclose_to_width(-(next_q.bits() as i64) - 40, prob.ceiling)?;
    if !c.lower().is_positive() {
        return Err(Error::exhausted(prob.ceiling, "separating ||q theta|| from zero"));
    }
    let (n, d) = c.lower().to_ratio();
    let target = &prob.mult * BigRational::new(d, n);
    let new_bound = max_power_below(&prob.base, &target).unwrap_or_default();
    Ok(ReductionCertificate {
        theta: prob.theta.to_string(),
        phi: prob.phi.to_string(),
        mult: prob.mult.clone(),
        base: prob.base.clone(),
        q,
        q_theta_dist: c.interval().clone(),
        q_phi_dist: Interval::point(Dyadic::zero()),
        k: BigInt::one(),
        old_bound: prob.bound.clone(),
        new_bound,
        next_q: Some(next_q),
    })
}

/// K-escalation: start at `k_start`, multiply by `factor` up to `attempts` times.
#[derive(Clone, Debug)]
pub struct KPolicy {
    pub k_start: BigInt,
    pub factor: BigInt,
    pub attempts: usize,
    pub max_rounds: usize,
}

impl Default for KPolicy {
    fn default() -> Self {
        KPolicy {
            k_start: BigInt::from(100),
            factor: BigInt::from(10),
            attempts: 12,
            max_rounds: 20,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReductionChain {
    pub final_bound: BigInt,
    pub certificates: Vec<ReductionCertificate>,
}

impl ReductionChain {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "final_bound": self.final_bound.to_string(),
            "certificates": self.certificates.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Repeats reduction steps with `R <- new bound` while the bound decreases.
pub fn reduce_to_fixpoint(prob: &ReductionProblem, policy: &KPolicy) -> Result<ReductionChain> {
    let mut current = prob.clone();
    let mut certificates = Vec::new();
    for _ in 0..policy.max_rounds {
        let step = if current.is_homogeneous() {
            match reduce_homogeneous_once(&current) {
                Ok(c) => Some(c),
                Err(Error::NotApplicable(_)) if !certificates.is_empty() => None,
                Err(e) => return Err(e),
            }
        } else {
            let mut k = policy.k_start.clone();
            let mut found = None;
            let mut last = None;
            for _ in 0..policy.attempts {
                match reduce_once(&current, &k) {
                    Ok(c) => {
                        found = Some(c);
                        break;
                    }
                    Err(e @ Error::SmallQPhi { .. }) => last = Some(e),
                    Err(e) => return Err(e),
                }
                k *= &policy.factor;
            }
            if found.is_none() && certificates.is_empty() {
                return Err(Error::Stalled(format!(
                    "no K in the escalation policy certified ||q phi|| >= 2/K ({})",
                    last.map(|e| e.to_string()).unwrap_or_default()
                )));
            }
            found
        };
        let Some(cert) = step else { break };
        if cert.new_bound >= current.bound {
            break;
        }
        current = current.with_bound(cert.new_bound.clone());
        certificates.push(cert);
    }
    Ok(ReductionChain {
        final_bound: current.bound,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Real {
        (Real::int(1) + Real::int(5).sqrt()) / Real::int(2)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn max_power_below_is_exact() {
        assert_eq!(max_power_below(&rat(2, 1), &rat(1024, 1)), Some(BigInt::from(9)));
        assert_eq!(max_power_below(&rat(2, 1), &rat(1025, 1)), Some(BigInt::from(10)));
        assert_eq!(max_power_below(&rat(3, 2), &rat(1, 1)), None);
        assert_eq!(max_power_below(&rat(3, 2), &rat(3, 2)), Some(BigInt::from(0)));
    }

    #[test]
    fn pow10_ceil_values() {
        assert_eq!(pow10_ceil(&rat(3, 1)).unwrap(), BigInt::from(1000));
        assert_eq!(pow10_ceil(&rat(1, 2)).unwrap(), BigInt::from(4));
    }

    #[test]
    fn golden_ratio_instance() {
        let prob = ReductionProblem::new(
            golden(),
            Real::ratio(1, 3),
            rat(1, 1),
            rat(2, 1),
            BigInt::from(1_000_000),
        )
        .unwrap();
        let cert = reduce_once(&prob, &BigInt::from(1000)).unwrap();
        assert!(cert.new_bound <= BigInt::from(45), "{}", cert.new_bound);
        cert.verify(1 << 14).unwrap();
    }

    #[test]
    fn homogeneous_phi_fails_baker_davenport() {
        let prob = ReductionProblem::new(golden(), Real::int(0), rat(1, 1), rat(2, 1), BigInt::from(1000)).unwrap();
        assert!(matches!(
            reduce_once(&prob, &BigInt::from(100)),
            Err(Error::SmallQPhi { .. })
        ));
        let chain = reduce_to_fixpoint(&prob, &KPolicy::default()).unwrap();
        assert!(chain.final_bound < BigInt::from(1000));
        for c in &chain.certificates {
            c.verify(1 << 14).unwrap();
        }
    }

    #[test]
    fn rejects_invalid_problems() {
        assert!(ReductionProblem::new(golden(), Real::int(0), rat(1, 2), rat(2, 1), BigInt::from(10)).is_err());
        assert!(ReductionProblem::new(golden(), Real::int(0), rat(1, 1), rat(1, 1), BigInt::from(10)).is_err());
        assert!(ReductionProblem::new(golden(), Real::int(0), rat(1, 1), rat(2, 1), BigInt::from(0)).is_err());
        let p = ReductionProblem::new(golden(), Real::ratio(1, 3), rat(1, 1), rat(2, 1), BigInt::from(10)).unwrap();
        assert!(reduce_once(&p, &BigInt::from(1)).is_err());
    }

    #[test]
    fn small_bound_terminates_quickly() {
        let prob = ReductionProblem::new(golden(), Real::ratio(1, 3), rat(1, 1), rat(2, 1), BigInt::from(100)).unwrap();
        let chain = reduce_to_fixpoint(&prob, &KPolicy::default()).unwrap();
        assert!(chain.final_bound <= BigInt::from(100));
        assert!(chain.certificates.len() <= 3);
    }

    /// `|r theta - s + phi| < A C^-r` for the nearest `s`, checked exactly enough.
    fn violates(theta: f64, phi: f64, theta_r: &Real, phi_r: &Real, r: u64) -> bool {
        let lam = r as f64 * theta + phi;
        let s = lam.round();
        let d = (lam - s).abs();
        if r < 40 && (d - 2f64.powi(-(r as i32))).abs() > 1e-9 {
            return d < 2f64.powi(-(r as i32));
        }
        if d > 1e-10 {
            return false;
        }
        let exact = (Real::int(r) * theta_r + phi_r).dist_to_int();
        let rhs = Real::ratio(1, BigInt::one() << r as usize);
        !compare(&exact, &rhs, 1 << 14).unwrap().is_true()
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn reduced_bound_is_sound(d in 2u32..200, a in 1i64..50, b in 2i64..60, rb in 10u64..3000) {
            let root = (d as f64).sqrt();
            proptest::prop_assume!(root.fract() != 0.0);
            proptest::prop_assume!(a % b != 0);
            let theta = Real::int(d).sqrt();
            let phi = Real::ratio(a, b);
            let prob = ReductionProblem::new(theta.clone(), phi.clone(), rat(1, 1), rat(2, 1), BigInt::from(rb)).unwrap();
            let Ok(cert) = reduce_once(&prob, &BigInt::from(100)) else { return Ok(()) };
            cert.verify(1 << 14).unwrap();
            let nb = cert.new_bound.to_u64().unwrap();
            for r in nb + 1..=rb {
                proptest::prop_assert!(!violates(root, a as f64 / b as f64, &theta, &phi, r), "r = {} beyond bound {}", r, nb);
            }
        }

        #[test]
        fn new_bound_is_logarithmic(e in 2u32..60) {
            let r = num_traits::pow(BigInt::from(10), e as usize);
            let prob = ReductionProblem::new(golden(), Real::ratio(1, 7), rat(1, 1), rat(2, 1), r).unwrap();
            let chain = reduce_to_fixpoint(&prob, &KPolicy::default()).unwrap();
            let first = &chain.certificates[0];
            // q ~ K R, so the bound is about log2(K^2 R)
            let expect = (e as f64 + 2.0 * first.k.to_string().len() as f64) * 3.33;
            proptest::prop_assert!(first.new_bound.to_f64().unwrap() <= expect + 10.0);
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let prob = ReductionProblem::new(
            golden(),
            Real::ratio(1, 3),
            rat(1, 1),
            rat(2, 1),
            BigInt::from(1_000_000),
        )
        .unwrap();
        let cert = reduce_once(&prob, &BigInt::from(1000)).unwrap();
        let mut bad = cert.clone();
        bad.q += 1;
        assert!(bad.verify(1 << 12).is_err());
        let mut bad = cert.clone();
        bad.new_bound = BigInt::from(3);
        assert!(bad.verify(1 << 12).is_err());
        let round = ReductionCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(round, cert);
    }
}
