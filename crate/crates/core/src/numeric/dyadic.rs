use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Rounding direction for inexact dyadic operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Floor,
    Ceil,
}

/// An exact binary rational `mant * 2^exp`, kept with an odd mantissa (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn floor_shr(x: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    // num-bigint shifts negative values toward -inf, which is floor division by 2^k.
    x >> k
}

fn ceil_shr(x: &BigInt, k: u64) -> BigInt {
    -floor_shr(&-x, k)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^e`
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: e,
        }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `e` with `2^(e-1) <= |x| < 2^e`; `i64::MIN` for zero.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.bits() as i64
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Round to at most `prec` significant bits in the given direction.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.bits();
        let prec = prec.max(2) as u64;
        if bits <= prec {
            return self.clone();
        }
        let k = bits - prec;
        let m = match dir {
            Round::Floor => floor_shr(&self.mant, k),
            Round::Ceil => ceil_shr(&self.mant, k),
        };
        Dyadic::new(m, self.exp + k as i64)
    }

    /// Round to a multiple of `2^-frac_bits`.
    pub fn round_abs(&self, frac_bits: i64, dir: Round) -> Self {
        if self.exp >= -frac_bits {
            return self.clone();
        }
        let k = (-frac_bits - self.exp) as u64;
        let m = match dir {
            Round::Floor => floor_shr(&self.mant, k),
            Round::Ceil => ceil_shr(&self.mant, k),
        };
        Dyadic::new(m, -frac_bits)
    }

    /// `num / den` rounded to `prec` significant bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, dir: Round) -> Self {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return Dyadic::zero();
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let shift = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (n, d, e) = if shift >= 0 {
            (num << shift as u64, den, -shift)
        } else {
            (num, den << (-shift) as u64, -shift)
        };
        let (q, r) = n.div_mod_floor(&d);
        let q = if dir == Round::Ceil && !r.is_zero() { q + 1 } else { q };
        Dyadic::new(q, e).round(prec, dir)
    }

    /// `self / other` rounded to `prec` significant bits.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Self {
        let q = Dyadic::from_ratio(&self.mant, &other.mant, prec, dir);
        q.shl(self.exp - other.exp)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            floor_shr(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            ceil_shr(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0
    }

    /// Exact numerator/denominator pair (denominator a power of two).
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        if self.exp >= 0 {
            (&self.mant << self.exp as u64, BigInt::one())
        } else {
            (self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (m, e) = if bits > 64 {
            let k = bits - 64;
            (floor_shr(&self.mant, k), self.exp + k as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        let e = e.clamp(-2000, 2000) as i32;
        mf * 2f64.powi(e)
    }

    /// Decimal digits of the value truncated toward -inf, with `digits` after the point.
    pub fn to_decimal_floor(&self, digits: u32) -> String {
        let scaled = self.mul(&Dyadic::from_bigint(num_traits::pow(BigInt::from(10), digits as usize)));
        format_scaled(&scaled.floor(), digits)
    }
}

/// Render `v / 10^digits` as a decimal string.
pub(crate) fn format_scaled(v: &BigInt, digits: u32) -> String {
    let neg = v.is_negative();
    let s = v.abs().to_string();
    let d = digits as usize;
    let body = if d == 0 {
        s
    } else if s.len() > d {
        format!("{}.{}", &s[..s.len() - d], &s[s.len() - d..])
    } else {
        format!("0.{}{}", "0".repeat(d - s.len()), s)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same nonzero sign: compare magnitudes first to avoid huge shifts
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            let ord = ma.cmp(&mb);
            return if sa > 0 { ord } else { ord.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Serialized as `mant*2^exp`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed dyadic string {s:?}"));
        let (m, e) = match s.split_once("*2^") {
            Some((m, e)) => (m, e),
            None => (s, "0"),
        };
        let mant = BigInt::from_str(m.trim()).map_err(|_| bad())?;
        let exp = e.trim().parse::<i64>().map_err(|_| bad())?;
        Ok(Dyadic::new(mant, exp))
    }
}
