//! abc triples measured against `max <= C S^kappa` and against the sharper
//! `max <= C0 S (log S)^s / s!`, plus the `||(3/2)^k||` condition behind the
//! ideal Waring formula `g(k) = 2^k + floor((3/2)^k) - 2`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::numeric::{compare, CertifiedReal, Real, Verdict};

const TRIAL_LIMIT: u64 = 1_000_000;
const CEILING: u32 = 1 << 12;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of a composite odd `n` (Pollard rho, Brent's variant).
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn factor_rec(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

/// Prime factorisation of `|n|` as sorted `(p, e)`, trial division to 10^6 and
/// then Miller–Rabin with Pollard rho on a cofactor below 2^64.
pub fn factorize(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    let mut primes: Vec<BigInt> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        while m.is_multiple_of(&pb) {
            m /= &pb;
            primes.push(pb.clone());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        match m.to_u64() {
            Some(v) => {
                let mut rest = Vec::new();
                factor_rec(v, &mut rest);
                primes.extend(rest.into_iter().map(BigInt::from));
            }
            None => return Err(Error::FactorizationTooHard(n.to_string())),
        }
    }
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// A coprime triple with `a + b + c = 0`, canonicalised so that
/// `0 < a <= b < c' = -c = a + b`.
#[derive(Clone, Debug)]
pub struct AbcTriple {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    /// Squarefree kernel: product of the primes dividing `abc`.
    pub radical: BigInt,
    /// Number of distinct primes dividing `abc`.
    pub prime_count: u32,
    /// `log max(|a|,|b|,|c|) / log S`.
    pub quality: CertifiedReal,
}

impl AbcTriple {
    pub fn max(&self) -> BigInt {
        self.c.abs()
    }

    /// Six certified decimals, or the lower endpoint's if the enclosure straddles a digit.
    pub fn quality_decimal(&self) -> String {
        self.quality
            .certified_decimal(6)
            .unwrap_or_else(|| self.quality.lower().to_decimal_floor(6))
    }

    pub fn quality_f64(&self) -> f64 {
        self.quality.to_f64()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "a": self.a.to_string(),
            "b": self.b.to_string(),
            "c": self.c.to_string(),
            "S": self.radical.to_string(),
            "s": self.prime_count,
            "quality": self.quality_decimal(),
        })
    }
}

pub fn analyze_triple(a: &BigInt, b: &BigInt, c: &BigInt) -> Result<AbcTriple> {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Err(Error::invalid("a, b, c must be nonzero"));
    }
    if !(a + b + c).is_zero() {
        return Err(Error::NotZeroSum);
    }
    if !a.gcd(b).gcd(c).is_one() {
        return Err(Error::NotCoprime);
    }
    // the two terms of one sign, sorted, and the third negated
    let mut v = [a.clone(), b.clone(), c.clone()];
    v.sort_by_key(|x| x.abs());
    let (x, y, z) = (v[0].abs(), v[1].abs(), v[2].abs());
    let mut primes: Vec<BigInt> = Vec::new();
    for t in [&x, &y, &z] {
        primes.extend(factorize(t)?.into_iter().map(|(p, _)| p));
    }
    primes.sort();
    primes.dedup();
    let radical: BigInt = primes.iter().product();
    let quality = quality_of(&z, &radical)?;
    Ok(AbcTriple {
        a: x,
        b: y,
        c: -z,
        radical,
        prime_count: primes.len() as u32,
        quality,
    })
}

fn quality_of(max: &BigInt, radical: &BigInt) -> Result<CertifiedReal> {
    if max == radical {
        return Real::int(1).certify(CEILING);
    }
    let q = Real::int(max.clone()).ln() / Real::int(radical.clone()).ln();
    q.enclose_to_width(-40, CEILING)
}

/// Right side of the refined inequality: `C0 S (log S)^s / s!`.
pub fn baker_refinement_rhs(t: &AbcTriple, c0: &BigRational) -> Real {
    let s = t.prime_count as u64;
    let fact: BigInt = (1..=s).map(BigInt::from).product::<BigInt>().max(BigInt::one());
    Real::rational(c0.clone() / BigRational::from_integer(fact))
        * Real::int(t.radical.clone())
        * Real::int(t.radical.clone()).ln().powi(s)
}

/// `True` when `max(|a|,|b|,|c|) <= C0 S (log S)^s / s!`, with
/// `log(rhs / max)` as the slack.
pub fn check_baker_refinement(t: &AbcTriple, c0: &BigRational) -> Result<(Verdict, f64)> {
    if t.radical < BigInt::from(2) {
        return Err(Error::invalid("S must be at least 2"));
    }
    let rhs = baker_refinement_rhs(t, c0);
    let max = Real::int(t.max());
    let verdict = match compare(&max, &rhs, CEILING)? {
        Verdict::True => Verdict::False,
        Verdict::False => Verdict::True,
        u => u,
    };
    let slack = (rhs / max).ln().certify(CEILING)?.to_f64();
    Ok((verdict, slack))
}

/// `rad(n)` for `n <= limit`.
pub fn radical_sieve(limit: usize) -> Vec<u64> {
    let mut rad = vec![1u64; limit + 1];
    for p in 2..=limit {
        if rad[p] == 1 {
            let mut m = p;
            while m <= limit {
                rad[m] *= p as u64;
                m += p;
            }
        }
    }
    if limit >= 1 {
        rad[0] = 0;
    }
    rad
}

#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub triple: AbcTriple,
    /// Whether the refined inequality holds (`None` if undecided at the ceiling).
    pub refinement_holds: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub max_c: u64,
    pub c0: BigRational,
    /// Number of coprime `a + b = c` with `a <= b`, `c <= max_c`.
    pub total_triples: u64,
    /// Triples with quality above 1, best first.
    pub hits: Vec<ScanEntry>,
    /// Triples violating the refined inequality, in `(c, a)` order.
    pub violations: Vec<ScanEntry>,
}

impl ScanReport {
    pub fn to_json(&self, top: usize) -> serde_json::Value {
        let entry = |e: &ScanEntry| {
            let mut v = e.triple.to_json();
            v["refinement_holds"] = json!(e.refinement_holds);
            v
        };
        json!({
            "max_c": self.max_c,
            "C0": self.c0.to_string(),
            "total_triples": self.total_triples,
            "quality_above_one": self.hits.len(),
            "top": self.hits.iter().take(top).map(entry).collect::<Vec<_>>(),
            "refinement_violations": self.violations.len(),
            "violations": self.violations.iter().map(entry).collect::<Vec<_>>(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,c,S,s,quality,refinement_holds\n");
        for e in &self.hits {
            let t = &e.triple;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                t.a,
                t.b,
                t.c,
                t.radical,
                t.prime_count,
                t.quality_decimal(),
                e.refinement_holds
                    .map(|b| b.to_string())
                    .unwrap_or_else(|| "unknown".into())
            );
        }
        out
    }
}

/// Every coprime `a + b = c`, `1 <= a <= b`, `c <= max_c`, that either has
/// quality above 1 or violates the refined inequality with constant `c0`.
///
/// Since `(log S)^s / s! >= log 2` for every squarefree `S >= 2`, a violation
/// needs `S < c / (c0 log 2)`, so only triples with
/// `S < c * max(1, 1/(c0 log 2))` are examined.
pub fn scan_triples(max_c: u64, c0: &BigRational) -> Result<ScanReport> {
    if max_c < 2 {
        return Err(Error::invalid("max must be at least 2"));
    }
    if !c0.is_positive() {
        return Err(Error::invalid("C0 must be positive"));
    }
    if max_c > 50_000_000 {
        return Err(Error::invalid("max above 5*10^7 is not supported"));
    }
    let n = max_c as usize;
    let rad = radical_sieve(n);
    let c0f = c0.to_f64().unwrap_or(f64::MAX);
    // widened by 1% so the float filter only admits a superset
    let lambda = (1.0 / (c0f * std::f64::consts::LN_2)).max(1.0) * 1.01;
    let mut by_rad: Vec<(u64, u64)> = (1..=n).map(|i| (rad[i], i as u64)).collect();
    by_rad.sort_unstable();

    let total_triples: u64 = (2..=n)
        .into_par_iter()
        .map(|c| if c == 2 { 1 } else { totient(c as u64, &rad) / 2 })
        .sum();

    let candidates: Vec<(u64, u64)> = (2..=max_c)
        .into_par_iter()
        .flat_map_iter(|c| {
            let rc = rad[c as usize];
            let limit = lambda * c as f64 / rc as f64;
            let rad = &rad;
            by_rad
                .iter()
                .take_while(move |(r, _)| (*r as f64) < limit)
                .filter_map(move |&(ra, a)| {
                    if 2 * a > c || a.gcd(&c) != 1 {
                        return None;
                    }
                    let s = ra as f64 * rad[(c - a) as usize] as f64 * rc as f64;
                    (s < lambda * c as f64).then_some((c, a))
                })
        })
        .collect();

    let mut entries: Vec<ScanEntry> = candidates
        .par_iter()
        .map(|&(c, a)| -> Result<Option<ScanEntry>> {
            let t = analyze_triple(&BigInt::from(a), &BigInt::from(c - a), &BigInt::from(-(c as i64)))?;
            let holds = match check_baker_refinement(&t, c0)?.0 {
                Verdict::True => Some(true),
                Verdict::False => Some(false),
                Verdict::Unknown(_) => None,
            };
            let hit = t.max() > t.radical;
            Ok((hit || holds != Some(true)).then_some(ScanEntry {
                triple: t,
                refinement_holds: holds,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    entries.sort_by(|x, y| (x.triple.max(), &x.triple.a).cmp(&(y.triple.max(), &y.triple.a)));
    let violations: Vec<ScanEntry> = entries
        .iter()
        .filter(|e| e.refinement_holds != Some(true))
        .cloned()
        .collect();
    let mut hits: Vec<ScanEntry> = entries
        .into_iter()
        .filter(|e| e.triple.max() > e.triple.radical)
        .collect();
    hits.sort_by(|x, y| {
        y.triple
            .quality
            .lower()
            .cmp(x.triple.quality.lower())
            .then_with(|| x.triple.max().cmp(&y.triple.max()))
            .then_with(|| x.triple.a.cmp(&y.triple.a))
    });
    Ok(ScanReport {
        max_c,
        c0: c0.clone(),
        total_triples,
        hits,
        violations,
    })
}

fn totient(n: u64, rad: &[u64]) -> u64 {
    // n prod (1 - 1/p) over p | rad(n)
    let mut r = rad[n as usize];
    let mut phi = n;
    let mut p = 2;
    while r > 1 {
        if r.is_multiple_of(p) {
            phi = phi / p * (p - 1);
            r /= p;
        }
        p += 1;
        if p * p > r && r > 1 {
            phi = phi / r * (r - 1);
            break;
        }
    }
    phi
}

/// `g(k) = 2^k + floor((3/2)^k) - 2`.
pub fn waring_g(k: u32) -> BigInt {
    let two_k = BigInt::one() << k as usize;
    let three_k = num_traits::pow(BigInt::from(3), k as usize);
    &two_k + three_k / &two_k - 2
}

#[derive(Clone, Debug)]
pub struct WaringReport {
    pub k_max: u32,
    /// `k` in `[5, k_max]` with `||(3/2)^k|| < (3^k + 2^k) / (4^k - 2^k)`.
    pub violations: Vec<u32>,
    /// `k` in `[2, k_max]` failing `2^k {(3/2)^k} + floor((3/2)^k) <= 2^k`,
    /// the condition under which the formula for `g(k)` is known to hold.
    pub formula_unsettled: Vec<u32>,
}

impl WaringReport {
    pub fn to_json(&self, g_up_to: u32) -> serde_json::Value {
        json!({
            "k_max": self.k_max,
            "violations": self.violations,
            "formula_unsettled": self.formula_unsettled,
            "g": (1..=g_up_to.min(self.k_max)).map(|k| json!({"k": k, "g": waring_g(k).to_string()})).collect::<Vec<_>>(),
        })
    }
}

/// Exact check of `||(3/2)^k|| >= (3^k + 2^k)/(4^k - 2^k)` for `5 <= k <= k_max`.
///
/// With `r = 3^k mod 2^k` and `m = min(r, 2^k - r)`, the condition is
/// `m (2^k - 1) >= 3^k + 2^k`.
pub fn waring_check(k_max: u32) -> Result<WaringReport> {
    if k_max < 5 {
        return Err(Error::invalid("kmax must be at least 5"));
    }
    let results: Vec<(u32, bool, bool)> = (2..=k_max)
        .into_par_iter()
        .map(|k| {
            let two_k = BigInt::one() << k as usize;
            let three_k = num_traits::pow(BigInt::from(3), k as usize);
            let r = &three_k & (&two_k - 1u32);
            let settled = &r + (&three_k >> k as usize) <= two_k;
            let m = (&two_k - &r).min(r);
            let ok = k < 5 || m * (&two_k - 1u32) >= three_k + two_k;
            (k, ok, settled)
        })
        .collect();
    Ok(WaringReport {
        k_max,
        violations: results.iter().filter(|r| !r.1).map(|r| r.0).collect(),
        formula_unsettled: results.iter().filter(|r| !r.2).map(|r| r.0).collect(),
    })
}

/// `||(3/2)^k||` exactly.
pub fn three_halves_distance(k: u32) -> BigRational {
    let two_k = BigInt::one() << k as usize;
    let r = num_traits::pow(BigInt::from(3), k as usize) % &two_k;
    let m = (&two_k - &r).min(r);
    BigRational::new(m, two_k)
}
