//! Exact integers/rationals (re-exported from `num`) and certified real interval
//! arithmetic with directed rounding.
//!
//! A [`Real`] is an immutable recipe; a [`CertifiedReal`] pairs a recipe with a
//! guaranteed enclosure that can be refined to any precision. Every inequality
//! verdict is either proven or reported as [`Verdict::Unknown`].

mod dyadic;
mod interval;
pub mod kernels;
mod parse;
mod real;

pub use dyadic::{Dyadic, Round};
pub use interval::Interval;
pub use num_bigint::BigInt as Integer;
pub use num_rational::BigRational as Rational;
pub use parse::{parse_expr, parse_rational};
pub use real::{
    certified_sign, compare, nearest_integer_distance, CertifiedReal, Real, Verdict, DEFAULT_CEILING, DEFAULT_PRECISION,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Exact `||q||` for a rational `q`.
pub fn rational_dist(q: &BigRational) -> BigRational {
    let f = q - BigRational::from_integer(q.floor().to_integer());
    let g = BigRational::from_integer(BigInt::from(1)) - &f;
    if f <= g {
        f
    } else {
        g
    }
}

/// `floor(log10 |n|) + 1` digits, 0 for zero.
pub fn decimal_digits(n: &BigInt) -> usize {
    if n.is_zero() {
        0
    } else {
        n.abs().to_string().len()
    }
}

/// Enclosure of a rational as a certified real (exact when dyadic).
pub fn rational_real(q: &BigRational) -> Real {
    Real::rational(q.clone())
}
