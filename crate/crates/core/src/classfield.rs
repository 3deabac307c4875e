//! Class numbers of imaginary quadratic fields `Q(sqrt(-d))` by counting reduced
//! binary quadratic forms, the `h = 1` and `h = 2` lists, idoneal numbers and
//! the near-integer `exp(pi sqrt 163)`.

use num_integer::Integer;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::numeric::{CertifiedReal, Real, DEFAULT_PRECISION};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormClassCount {
    pub d: u64,
    pub discriminant: i64,
    pub h: u64,
}

impl FormClassCount {
    pub fn to_json(&self) -> serde_json::Value {
        json!({ "d": self.d, "discriminant": self.discriminant, "h": self.h })
    }
}

pub fn is_squarefree(n: u64) -> bool {
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Discriminant of `Q(sqrt(-d))`: `-d` if `d = 3 mod 4`, else `-4d`.
pub fn field_discriminant(d: u64) -> i64 {
    if d % 4 == 3 {
        -(d as i64)
    } else {
        -4 * d as i64
    }
}

/// Reduced primitive positive definite forms `(a, b, c)` of discriminant `disc < 0`.
pub fn reduced_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    let n = -disc;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = -a + 1;
        while b <= a {
            if (b * b + n) % (4 * a) == 0 {
                let c = (b * b + n) / (4 * a);
                let edge = b.abs() == a || a == c;
                if c >= a && !(edge && b < 0) && a.gcd(&b).gcd(&c) == 1 {
                    out.push((a, b, c));
                }
            }
            b += 1;
        }
        a += 1;
    }
    out
}

pub fn class_number(d: u64) -> Result<FormClassCount> {
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    if !is_squarefree(d) {
        return Err(Error::NotSquarefree(d.to_string()));
    }
    let discriminant = field_discriminant(d);
    Ok(FormClassCount {
        d,
        discriminant,
        h: reduced_forms(discriminant).len() as u64,
    })
}

/// Squarefree `d <= d_max` with class number `h`, ascending.
pub fn gauss_list(h: u64, d_max: u64) -> Result<Vec<u64>> {
    if h < 1 || d_max < 1 {
        return Err(Error::invalid("h and dmax must be at least 1"));
    }
    let mut out: Vec<u64> = (1..=d_max)
        .into_par_iter()
        .filter(|&d| is_squarefree(d) && reduced_forms(field_discriminant(d)).len() as u64 == h)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// `true` iff `n` is not `xy + yz + zx` with `0 < x < y < z`.
pub fn is_idoneal(n: u64) -> bool {
    let mut x = 1u64;
    // smallest value with this x is x(x+1) + (x+2)(2x+1)
    while x * (x + 1) + (x + 2) * (2 * x + 1) <= n {
        let mut y = x + 1;
        while x * y + (y + 1) * (x + y) <= n {
            let rest = n - x * y;
            if rest.is_multiple_of(x + y) && rest / (x + y) > y {
                return false;
            }
            y += 1;
        }
        x += 1;
    }
    true
}

pub fn idoneal_numbers(n_max: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=n_max).into_par_iter().filter(|&n| is_idoneal(n)).collect();
    v.sort_unstable();
    v
}

/// Certified decimal expansion of `exp(pi sqrt d)`.
#[derive(Clone, Debug)]
pub struct NearInteger {
    pub d: u64,
    pub decimal: String,
    pub enclosure: CertifiedReal,
}

impl NearInteger {
    pub fn integer_part(&self) -> &str {
        self.decimal.split('.').next().unwrap_or("")
    }

    pub fn fractional_part(&self) -> &str {
        self.decimal.split_once('.').map(|(_, f)| f).unwrap_or("")
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "expression": format!("exp(pi*sqrt({}))", self.d),
            "decimal": self.decimal,
            "enclosure": [self.enclosure.lower().to_string(), self.enclosure.upper().to_string()],
        })
    }
}

pub fn near_integer(d: u64, digits: u32, ceiling: u32) -> Result<NearInteger> {
    let x = (Real::pi() * Real::int(d).sqrt()).exp();
    let mut c = CertifiedReal::new(x, DEFAULT_PRECISION, ceiling)?;
    loop {
        if let Some(decimal) = c.certified_decimal(digits) {
            return Ok(NearInteger {
                d,
                decimal,
                enclosure: c,
            });
        }
        if c.bits() >= ceiling {
            return Err(Error::exhausted(
                ceiling,
                format!("fixing {digits} digits of exp(pi sqrt {d})"),
            ));
        }
        c = c.refine((c.bits() * 2).min(ceiling))?;
    }
}

pub fn near_integer_163(digits: u32, ceiling: u32) -> Result<NearInteger> {
    near_integer(163, digits, ceiling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DEFAULT_CEILING;

    /// Kronecker symbol `(D / n)` for `n >= 1`.
    fn kronecker(disc: i64, n: i64) -> i64 {
        let mut result = 1;
        let mut n = n;
        while n % 2 == 0 {
            n /= 2;
            if disc % 2 == 0 {
                return 0;
            }
            if disc.rem_euclid(8) == 3 || disc.rem_euclid(8) == 5 {
                result = -result;
            }
        }
        // Jacobi symbol (disc / n), n odd
        let mut a = disc.rem_euclid(n);
        let mut m = n;
        while a != 0 {
            while a % 2 == 0 {
                a /= 2;
                if m % 8 == 3 || m % 8 == 5 {
                    result = -result;
                }
            }
            std::mem::swap(&mut a, &mut m);
            if a % 4 == 3 && m % 4 == 3 {
                result = -result;
            }
            a %= m;
        }
        if m == 1 {
            result
        } else {
            0
        }
    }

    /// `h = -(w / 2|D|) sum_{a < |D|} (D/a) a`.
    fn dirichlet_class_number(disc: i64) -> i64 {
        let n = -disc;
        let w = match disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        let s: i64 = (1..n).map(|a| kronecker(disc, a) * a).sum();
        -w * s / (2 * n)
    }

    #[test]
    fn small_values() {
        assert_eq!(class_number(163).unwrap().h, 1);
        assert_eq!(class_number(5).unwrap().h, 2);
        let one = class_number(1).unwrap();
        assert_eq!((one.discriminant, one.h), (-4, 1));
        assert!(matches!(class_number(12), Err(Error::NotSquarefree(_))));
    }

    #[test]
    fn agrees_with_analytic_formula() {
        for d in 1..=1000u64 {
            if !is_squarefree(d) {
                continue;
            }
            let disc = field_discriminant(d);
            assert_eq!(
                class_number(d).unwrap().h as i64,
                dirichlet_class_number(disc),
                "d = {d}"
            );
        }
    }

    #[test]
    fn genus_lower_bound() {
        for d in 1..=1000u64 {
            if !is_squarefree(d) {
                continue;
            }
            let odd_primes = (3..=d).filter(|p| d % p == 0 && (2..*p).all(|q| p % q != 0)).count();
            if odd_primes >= 2 {
                assert!(class_number(d).unwrap().h >= 2, "d = {d}");
            }
        }
    }

    #[test]
    fn gauss_lists() {
        assert_eq!(gauss_list(1, 10_000).unwrap(), vec![1, 2, 3, 7, 11, 19, 43, 67, 163]);
        assert_eq!(
            gauss_list(2, 10_000).unwrap(),
            vec![5, 6, 10, 13, 15, 22, 35, 37, 51, 58, 91, 115, 123, 187, 235, 267, 403, 427]
        );
        assert_eq!(gauss_list(1, 2).unwrap(), vec![1, 2]);
    }

    #[test]
    fn idoneal() {
        assert!(is_idoneal(1848));
        assert!(!is_idoneal(11));
        let list = idoneal_numbers(20_000);
        assert_eq!(list.len(), 65);
        assert_eq!(&list[..10], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(&list[62..], &[1320, 1365, 1848]);
    }

    fn idoneal_cube(n: u64, bound: u64) -> bool {
        for x in 1..=bound {
            for y in x + 1..=bound {
                for z in y + 1..=bound {
                    let v = x * y + y * z + z * x;
                    if v == n {
                        return false;
                    }
                    if v > n {
                        break;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn widening_the_search_cube_changes_nothing() {
        for n in (1..=2000u64).step_by(7) {
            let b = n / 2 + 1;
            assert_eq!(idoneal_cube(n, b), is_idoneal(n), "n = {n}");
            assert_eq!(idoneal_cube(n, b), idoneal_cube(n, 2 * b), "n = {n}");
        }
    }

    #[test]
    fn near_integer_digits() {
        let r = near_integer_163(30, DEFAULT_CEILING).unwrap();
        assert_eq!(r.decimal, "262537412640768743.999999999999250072597198185688");
        let r67 = near_integer(67, 8, DEFAULT_CEILING).unwrap();
        assert_eq!(r67.decimal, "147197952743.99999866");
    }
}
