use diophant::contfrac::{expand_rational, solve_pell};
use diophant::numeric::{Dyadic, Integer, Interval, Rational};
use num_traits::{One, Signed};
use proptest::prelude::*;

fn exact(x: &Dyadic) -> Rational {
    let m = Rational::from_integer(x.mant().clone());
    let two = Rational::from_integer(Integer::from(2));
    m * num_traits::pow::Pow::pow(&two, x.exp() as i32)
}

proptest! {
    #[test]
    fn rational_expansion_round_trips(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
        let q = Rational::new(Integer::from(n), Integer::from(d));
        let cf = expand_rational(&q);
        prop_assert!(cf.is_terminated());
        prop_assert_eq!(cf.value().unwrap(), q);
        for w in cf.convergents().windows(2) {
            let ((p0, q0), (p1, q1)) = (&w[0], &w[1]);
            let det = p1 * q0 - p0 * q1;
            prop_assert!(det.abs().is_one());
        }
    }

    #[test]
    fn ratio_enclosure_contains_value(n in -1_000_000_000i64..1_000_000_000, d in 1i64..1_000_000_000, prec in 8u32..200) {
        let iv = Interval::from_ratio(&Integer::from(n), &Integer::from(d), prec);
        let q = Rational::new(Integer::from(n), Integer::from(d));
        prop_assert!(exact(&iv.lo) <= q && q <= exact(&iv.hi));
    }

    #[test]
    fn pell_solutions_satisfy_equation(d in 2u64..5000) {
        let r = (d as f64).sqrt() as u64;
        prop_assume!(r * r != d && (r + 1) * (r + 1) != d);
        let s = solve_pell(&Integer::from(d)).unwrap();
        prop_assert!(s.verify());
        let (x2, y2) = s.power(2);
        prop_assert_eq!(&x2 * &x2 - Integer::from(d) * &y2 * &y2, Integer::one());
    }
}
