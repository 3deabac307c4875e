//! End-to-end solvers: squares and cubes, Mordell curves, the cubic Thue
//! equation `x^3 - 2y^3 = m`, exponential gaps `a^r - b^s = m` and the
//! extension problem for the quadruple `{1, 3, 8, 120}`.

mod expgap;
mod quadfield;
mod quadruple;
mod thue;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::logforms::{bound_mordell, BoundResult};

pub use expgap::{multiplicatively_dependent, solve_exponential_gap, ExpGapReport};
pub use quadfield::Q23;
pub use quadruple::{
    alpha3, quadruple_inequality, solve_quadruple, solve_quadruple_with, sqrt3_solution, sqrt8_solution,
    FamilyReduction, QuadrupleInequality, QuadrupleReport,
};
pub use thue::{solve_thue_cubic, thue_brute_force, ThueMethod, ThueSolutionSet};

/// `Some(r)` with `r >= 0` and `r^2 = n`.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// `Some(r)` with `r^3 = n`.
pub fn exact_cbrt(n: &BigInt) -> Option<BigInt> {
    let r = n.abs().cbrt();
    if (&r * &r * &r) != n.abs() {
        return None;
    }
    Some(if n.is_negative() { -r } else { r })
}

/// A value in the merged list of squares and cubes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sqube {
    pub value: u64,
    pub square_root: Option<u64>,
    pub cube_root: Option<u64>,
    /// Distance to the next entry of the list, if it is within the limit.
    pub gap: Option<u64>,
}

/// Ascending squares and cubes `>= 1`, each value once.
pub struct SqubeIter {
    next_square: u64,
    next_cube: u64,
}

impl SqubeIter {
    pub fn new() -> Self {
        SqubeIter {
            next_square: 1,
            next_cube: 1,
        }
    }
}

impl Default for SqubeIter {
    fn default() -> Self {
        SqubeIter::new()
    }
}

impl Iterator for SqubeIter {
    /// `(value, square root, cube root)`
    type Item = (u64, Option<u64>, Option<u64>);

    fn next(&mut self) -> Option<Self::Item> {
        let s = self.next_square.checked_mul(self.next_square)?;
        let c = self
            .next_cube
            .checked_mul(self.next_cube)?
            .checked_mul(self.next_cube)?;
        Some(match s.cmp(&c) {
            Ordering::Less => {
                self.next_square += 1;
                (s, Some(self.next_square - 1), None)
            }
            Ordering::Greater => {
                self.next_cube += 1;
                (c, None, Some(self.next_cube - 1))
            }
            Ordering::Equal => {
                self.next_square += 1;
                self.next_cube += 1;
                (s, Some(self.next_square - 1), Some(self.next_cube - 1))
            }
        })
    }
}

/// Sorted squares and cubes up to `limit` with the gap to the next entry.
pub fn squbes(limit: u64) -> Result<Vec<Sqube>> {
    if limit < 1 {
        return Err(Error::invalid("limit must be at least 1"));
    }
    let raw: Vec<_> = SqubeIter::new().take_while(|&(v, _, _)| v <= limit).collect();
    Ok(raw
        .iter()
        .enumerate()
        .map(|(i, &(value, square_root, cube_root))| Sqube {
            value,
            square_root,
            cube_root,
            gap: raw.get(i + 1).map(|n| n.0 - value),
        })
        .collect())
}

/// Pairs `(cube, square)` of the list up to `limit` with `square - cube = gap`.
pub fn sqube_gaps(limit: u64, gap: i64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut x: u64 = 1;
    while let Some(c) = x.checked_pow(3).filter(|c| *c <= limit) {
        if let Some(t) = (c as i128)
            .checked_add(gap as i128)
            .filter(|t| *t >= 1 && *t <= limit as i128)
        {
            let t = t as u64;
            let r = t.isqrt();
            if r * r == t {
                out.push((c, t));
            }
        }
        x += 1;
    }
    out
}

/// Integral points on `y^2 = x^3 + k` with `|x|` below a search bound.
#[derive(Clone, Debug)]
pub struct MordellSolutionSet {
    pub k: BigInt,
    pub solutions: Vec<(BigInt, BigInt)>,
    pub search_bound: BigInt,
    /// Only true if the search reached a proven bound; never the case at desk scale.
    pub complete: bool,
    pub proven_bound: BoundResult,
}

impl MordellSolutionSet {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "equation": "y^2 = x^3 + k",
            "k": self.k.to_string(),
            "search_bound": self.search_bound.to_string(),
            "solutions": self.solutions.iter().map(|(x, y)| json!([x.to_string(), y.to_string()])).collect::<Vec<_>>(),
            "complete": self.complete,
            "proven_bound": self.proven_bound.to_json(),
        })
    }
}

const SEARCH_CHUNK: i64 = 4096;

/// All `(x, y)` with `|x| <= bound` and `y^2 = x^3 + k`, sorted by `(x, y)`.
pub fn solve_mordell(k: &BigInt, bound: &BigInt) -> Result<MordellSolutionSet> {
    if k.is_zero() {
        return Err(Error::invalid("k must be nonzero"));
    }
    if bound < &BigInt::one() {
        return Err(Error::invalid("search bound must be at least 1"));
    }
    let b = bound
        .to_i64()
        .filter(|b| *b <= 1 << 40)
        .ok_or_else(|| Error::invalid("search bound must not exceed 2^40"))?;
    // x^3 + k >= 0 forces x >= -cbrt(k)
    let lo = if k.is_positive() {
        let c = k.cbrt().to_i64().unwrap_or(i64::MAX);
        (-c - 1).max(-b)
    } else {
        (-k).cbrt().to_i64().unwrap_or(i64::MAX).min(b)
    };
    let chunks: Vec<i64> = (lo..=b).step_by(SEARCH_CHUNK as usize).collect();
    let mut solutions: Vec<(BigInt, BigInt)> = chunks
        .par_iter()
        .flat_map_iter(|&start| {
            let end = (start + SEARCH_CHUNK - 1).min(b);
            (start..=end).flat_map(move |x| {
                let xb = BigInt::from(x);
                let t = &xb * &xb * &xb + k;
                match exact_sqrt(&t) {
                    Some(y) if y.is_zero() => vec![(xb, y)],
                    Some(y) => vec![(xb.clone(), -y.clone()), (xb, y)],
                    None => vec![],
                }
            })
        })
        .collect();
    solutions.sort();
    Ok(MordellSolutionSet {
        k: k.clone(),
        solutions,
        search_bound: bound.clone(),
        complete: false,
        proven_bound: bound_mordell(k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squbes_to_100() {
        let v: Vec<u64> = squbes(100).unwrap().iter().map(|s| s.value).collect();
        assert_eq!(v, vec![1, 4, 8, 9, 16, 25, 27, 36, 49, 64, 81, 100]);
        assert_eq!(squbes(1).unwrap().len(), 1);
        assert!(squbes(0).is_err());
    }

    #[test]
    fn gap_seventeen_twice() {
        let g = sqube_gaps(143_384_152_921, 17);
        assert!(g.contains(&(8, 25)) && g.contains(&(64, 81)));
        assert_eq!(g.last(), Some(&(143_384_152_904, 143_384_152_921)));
        // consecutive gaps come from the merged list
        let list = squbes(30).unwrap();
        assert_eq!(
            list.iter().map(|s| s.gap).collect::<Vec<_>>(),
            vec![Some(3), Some(4), Some(1), Some(7), Some(9), Some(2), None]
        );
    }

    #[test]
    fn mordell_k17() {
        let s = solve_mordell(&BigInt::from(17), &BigInt::from(10_000)).unwrap();
        let xs: Vec<i64> = s
            .solutions
            .iter()
            .filter(|(_, y)| y.is_positive())
            .map(|(x, _)| x.to_i64().unwrap())
            .collect();
        assert_eq!(xs, vec![-2, -1, 2, 4, 8, 43, 52, 5234]);
        assert!(s.solutions.contains(&(BigInt::from(5234), BigInt::from(378661))));
        assert!(!s.complete);
        for (x, y) in &s.solutions {
            assert_eq!(y * y, x * x * x + 17);
            assert!(s.solutions.contains(&(x.clone(), -y)));
        }
    }

    #[test]
    fn mordell_small_cases() {
        let s = solve_mordell(&BigInt::from(1), &BigInt::from(1000)).unwrap();
        let expect: Vec<(BigInt, BigInt)> = [(-1, 0), (0, -1), (0, 1), (2, -3), (2, 3)]
            .iter()
            .map(|&(x, y)| (BigInt::from(x), BigInt::from(y)))
            .collect();
        assert_eq!(s.solutions, expect);
        assert!(solve_mordell(&BigInt::from(6), &BigInt::from(10_000))
            .unwrap()
            .solutions
            .is_empty());
        assert!(solve_mordell(&BigInt::from(0), &BigInt::from(10)).is_err());
    }

    #[test]
    fn mordell_negative_k() {
        // y^2 = x^3 - 2 has (3, +-5)
        let s = solve_mordell(&BigInt::from(-2), &BigInt::from(1000)).unwrap();
        assert_eq!(
            s.solutions,
            vec![(BigInt::from(3), BigInt::from(-5)), (BigInt::from(3), BigInt::from(5))]
        );
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_cbrt(&BigInt::from(-27)), Some(BigInt::from(-3)));
        assert_eq!(exact_cbrt(&BigInt::from(26)), None);
        assert_eq!(exact_sqrt(&BigInt::from(-4)), None);
        assert_eq!(exact_sqrt(&BigInt::from(0)), Some(BigInt::from(0)));
    }
}
