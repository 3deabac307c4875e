//! Exact arithmetic in `Q(sqrt 2, sqrt 3)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::Real;

/// `c0 + c1 sqrt2 + c2 sqrt3 + c3 sqrt6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q23(pub [BigRational; 4]);

fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Q23 {
    pub fn new(c0: i64, c1: i64, c2: i64, c3: i64) -> Self {
        Q23([r(c0), r(c1), r(c2), r(c3)])
    }

    pub fn rational(q: BigRational) -> Self {
        Q23([q, r(0), r(0), r(0)])
    }

    pub fn zero() -> Self {
        Q23::new(0, 0, 0, 0)
    }

    pub fn one() -> Self {
        Q23::new(1, 0, 0, 0)
    }

    pub fn sqrt2() -> Self {
        Q23::new(0, 1, 0, 0)
    }

    pub fn sqrt3() -> Self {
        Q23::new(0, 0, 1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.0[1..].iter().all(|c| c.is_zero()).then_some(&self.0[0])
    }

    /// Image under `sqrt2 -> s2 sqrt2`, `sqrt3 -> s3 sqrt3`.
    pub fn conjugate(&self, s2: bool, s3: bool) -> Self {
        let [c0, c1, c2, c3] = &self.0;
        let f = |c: &BigRational, neg: bool| if neg { -c.clone() } else { c.clone() };
        Q23([c0.clone(), f(c1, s2), f(c2, s3), f(c3, s2 != s3)])
    }

    /// All four conjugates, identity first.
    pub fn conjugates(&self) -> [Q23; 4] {
        [
            self.clone(),
            self.conjugate(true, false),
            self.conjugate(false, true),
            self.conjugate(true, true),
        ]
    }

    pub fn norm(&self) -> BigRational {
        let c = self.conjugates();
        let p = &(&c[0] * &c[1]) * &(&c[2] * &c[3]);
        p.as_rational().cloned().expect("norm is rational")
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::invalid("division by zero in Q(sqrt2, sqrt3)"));
        }
        let c = self.conjugates();
        let rest = &(&c[1] * &c[2]) * &c[3];
        Ok(&rest * &Q23::rational(BigRational::one() / n))
    }

    /// Minimal polynomial over `Z` as primitive integer coefficients, leading first.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        let mut conj: Vec<Q23> = Vec::new();
        for c in self.conjugates() {
            if !conj.contains(&c) {
                conj.push(c);
            }
        }
        // coefficients in the field, lowest degree first
        let mut poly = vec![Q23::one()];
        for c in &conj {
            let mut next = vec![Q23::zero(); poly.len() + 1];
            for (i, p) in poly.iter().enumerate() {
                next[i + 1] = &next[i + 1] + p;
                next[i] = &next[i] - &(p * c);
            }
            poly = next;
        }
        let rat: Vec<BigRational> = poly
            .iter()
            .map(|p| {
                p.as_rational()
                    .cloned()
                    .expect("symmetric functions of conjugates are rational")
            })
            .collect();
        let lcm = rat.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let ints: Vec<BigInt> = rat
            .iter()
            .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let mut out: Vec<BigInt> = ints.iter().rev().map(|c| c / &g).collect();
        if out[0].is_negative() {
            out.iter_mut().for_each(|c| *c = -c.clone());
        }
        out
    }

    pub fn to_real(&self) -> Real {
        let basis = [
            Real::int(1),
            Real::int(2).sqrt(),
            Real::int(3).sqrt(),
            Real::int(6).sqrt(),
        ];
        let mut acc: Option<Real> = None;
        for (c, b) in self.0.iter().zip(basis) {
            if c.is_zero() {
                continue;
            }
            let term = if c.is_one() { b } else { Real::rational(c.clone()) * b };
            acc = Some(match acc {
                Some(a) => a + term,
                None => term,
            });
        }
        acc.unwrap_or_else(|| Real::int(0))
    }
}

impl fmt::Display for Q23 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "*sqrt(2)", "*sqrt(3)", "*sqrt(6)"];
        let mut first = true;
        for (c, n) in self.0.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({c}){n}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Q23 {
    type Output = Q23;
    fn add(self, o: &Q23) -> Q23 {
        Q23(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }
}

impl Sub for &Q23 {
    type Output = Q23;
    fn sub(self, o: &Q23) -> Q23 {
        Q23(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

impl Neg for &Q23 {
    type Output = Q23;
    fn neg(self) -> Q23 {
        Q23(std::array::from_fn(|i| -&self.0[i]))
    }
}

impl Mul for &Q23 {
    type Output = Q23;
    fn mul(self, o: &Q23) -> Q23 {
        let [a0, a1, a2, a3] = &self.0;
        let [b0, b1, b2, b3] = &o.0;
        let (two, three, six) = (r(2), r(3), r(6));
        Q23([
            a0 * b0 + &two * a1 * b1 + &three * a2 * b2 + &six * a3 * b3,
            a0 * b1 + a1 * b0 + &three * (a2 * b3 + a3 * b2),
            a0 * b2 + a2 * b0 + &two * (a1 * b3 + a3 * b1),
            a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_table() {
        let s2 = Q23::sqrt2();
        let s3 = Q23::sqrt3();
        assert_eq!(&s2 * &s2, Q23::new(2, 0, 0, 0));
        assert_eq!(&s2 * &s3, Q23::new(0, 0, 0, 1));
        let s6 = &s2 * &s3;
        assert_eq!(&s6 * &s6, Q23::new(6, 0, 0, 0));
        assert_eq!(&s6 * &s2, Q23::new(0, 0, 2, 0));
    }

    #[test]
    fn inverse_and_norm() {
        let x = Q23::new(1, 2, -3, 1);
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Q23::one());
        assert_eq!(Q23::new(2, 0, 1, 0).norm(), r(1));
    }

    #[test]
    fn minimal_polynomials() {
        assert_eq!(
            Q23::new(2, 0, 1, 0).minimal_polynomial(),
            vec![BigInt::from(1), (-4).into(), 1.into()]
        );
        let x = Q23::new(1, 1, 1, 0);
        // sqrt2 + sqrt3 + 1 has degree 4
        assert_eq!(x.minimal_polynomial().len(), 5);
    }
}
