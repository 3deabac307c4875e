use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::dyadic::{Dyadic, Round};

/// A closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(v: &BigInt) -> Self {
        Interval::point(Dyadic::from_bigint(v.clone()))
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        let den_is_pow2 = {
            let d = den.abs();
            d.is_one() || (&d & (&d - 1u32)) == BigInt::from(0)
        };
        if den_is_pow2 {
            let shift = den.abs().bits() as i64 - 1;
            let mut x = Dyadic::new(num.clone(), -shift);
            if den.is_negative() {
                x = x.neg();
            }
            return Interval::point(x);
        }
        Interval {
            lo: Dyadic::from_ratio(num, den, prec, Round::Floor),
            hi: Dyadic::from_ratio(num, den, prec, Round::Ceil),
        }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Outward rounding of both endpoints to `prec` significant bits.
    pub fn round(&self, prec: u32) -> Self {
        Interval {
            lo: self.lo.round(prec, Round::Floor),
            hi: self.hi.round(prec, Round::Ceil),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo >= other.lo {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi <= other.hi {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: Dyadic::zero(),
                hi: self.hi.clone().max(self.lo.neg()),
            }
        }
    }

    pub fn add(&self, other: &Interval, prec: u32) -> Self {
        Interval {
            lo: self.lo.add(&other.lo).round(prec, Round::Floor),
            hi: self.hi.add(&other.hi).round(prec, Round::Ceil),
        }
    }

    pub fn sub(&self, other: &Interval, prec: u32) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Interval, prec: u32) -> Self {
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c < &lo {
                lo = c.clone();
            }
            if c > &hi {
                hi = c.clone();
            }
        }
        Interval {
            lo: lo.round(prec, Round::Floor),
            hi: hi.round(prec, Round::Ceil),
        }
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, other: &Interval, prec: u32) -> Option<Self> {
        if other.contains_zero() {
            return None;
        }
        let p = prec + 4;
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let l = a.div(b, p, Round::Floor);
                let h = a.div(b, p, Round::Ceil);
                lo = Some(match lo {
                    Some(x) if x <= l => x,
                    _ => l,
                });
                hi = Some(match hi {
                    Some(x) if x >= h => x,
                    _ => h,
                });
            }
        }
        let (lo, hi) = (lo?, hi?);
        Some(Interval {
            lo: lo.round(prec, Round::Floor),
            hi: hi.round(prec, Round::Ceil),
        })
    }

    /// Integer power; even powers of sign-straddling intervals are handled exactly.
    pub fn powi(&self, k: u64, prec: u32) -> Self {
        if k == 0 {
            return Interval::point(Dyadic::one());
        }
        let guard = prec + 2 * (64 - k.leading_zeros()) + 8;
        let pos_pow = |x: &Dyadic, dir: Round| -> Dyadic {
            // x >= 0
            let mut result = Dyadic::one();
            let mut base = x.clone();
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    result = result.mul(&base).round(guard, dir);
                }
                e >>= 1;
                if e > 0 {
                    base = base.mul(&base).round(guard, dir);
                }
            }
            result
        };
        let a = self.abs();
        let lo_mag = pos_pow(&a.lo, Round::Floor);
        let hi_mag = pos_pow(&a.hi, Round::Ceil);
        let out = if !self.lo.is_negative() {
            Interval::new(lo_mag, hi_mag)
        } else if !self.hi.is_positive() {
            if k.is_multiple_of(2) {
                Interval::new(lo_mag, hi_mag)
            } else {
                Interval::new(hi_mag.neg(), lo_mag.neg())
            }
        } else if k.is_multiple_of(2) {
            Interval::new(Dyadic::zero(), hi_mag)
        } else {
            let lo = pos_pow(&self.lo.neg(), Round::Ceil).neg();
            let hi = pos_pow(&self.hi, Round::Ceil);
            Interval::new(lo, hi)
        };
        out.round(prec)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    /// Width relative to the magnitude, as a power-of-two exponent upper bound.
    pub fn width_log2(&self) -> i64 {
        self.width().magnitude()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(Dyadic::from_int(a), Dyadic::from_int(b))
    }

    #[test]
    fn mul_covers_sign_cases() {
        assert_eq!(iv(-2, 3).mul(&iv(-5, 4), 64), iv(-15, 12));
        assert_eq!(iv(-2, -1).mul(&iv(-5, -4), 64), iv(4, 10));
    }

    #[test]
    fn even_power_of_straddling_interval() {
        assert_eq!(iv(-3, 2).powi(2, 64), iv(0, 9));
        assert_eq!(iv(-3, 2).powi(3, 64), iv(-27, 8));
        assert_eq!(iv(-3, -2).powi(2, 64), iv(4, 9));
    }

    #[test]
    fn division_rejects_zero() {
        assert!(iv(1, 2).div(&iv(-1, 1), 64).is_none());
        let q = iv(1, 1).div(&iv(3, 3), 64).unwrap();
        assert!(q.lo < q.hi);
    }

    #[test]
    fn ratio_of_power_of_two_is_exact() {
        let x = Interval::from_ratio(&BigInt::from(-3), &BigInt::from(8), 10);
        assert!(x.is_point());
        assert_eq!(x.lo, Dyadic::new(BigInt::from(-3), -3));
    }
}
