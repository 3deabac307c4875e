//! Rigorous fixed-point kernels for the transcendental constants and functions.
//!
//! Every kernel returns an interval guaranteed to contain the true value:
//! truncation is bracketed by explicit tail bounds and each rounding step is
//! directed (floor for lower sums, ceil for upper sums).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::{Dyadic, Round};
use super::interval::Interval;

fn div_floor(a: &BigInt, d: &BigInt) -> BigInt {
    a.div_floor(d)
}

fn div_ceil(a: &BigInt, d: &BigInt) -> BigInt {
    -(-a).div_floor(d)
}

fn shr_floor(a: &BigInt, k: u64) -> BigInt {
    a >> k
}

fn shr_ceil(a: &BigInt, k: u64) -> BigInt {
    -((-a) >> k)
}

/// Sum of `z^(2k+1)/(2k+1)` for `0 <= z <= 1/3`, with `z` given as a fixed-point
/// interval `[zl, zh] * 2^-w`. Returns the fixed-point enclosure of `atanh(z)`.
fn atanh_fixed(zl: &BigInt, zh: &BigInt, w: u64) -> (BigInt, BigInt) {
    debug_assert!(!zl.is_negative());
    let z2l = shr_floor(&(zl * zl), w);
    let z2h = shr_ceil(&(zh * zh), w);
    let mut pl = zl.clone();
    let mut ph = zh.clone();
    let mut sl = BigInt::zero();
    let mut sh = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        sl += div_floor(&pl, &d);
        sh += div_ceil(&ph, &d);
        pl = shr_floor(&(&pl * &z2l), w);
        ph = shr_ceil(&(&ph * &z2h), w);
        k += 1;
        if ph <= BigInt::one() {
            // tail <= p_k * sum_j z^(2j) <= p_k / (1 - 1/9) < 2 p_k
            sh += &ph * 2u32 + 1u32;
            break;
        }
    }
    (sl, sh)
}

fn fixed_to_interval(lo: BigInt, hi: BigInt, w: u64) -> Interval {
    Interval::new(Dyadic::new(lo, -(w as i64)), Dyadic::new(hi, -(w as i64)))
}

/// `ln 2 = 2 atanh(1/3)`.
pub fn ln2(prec: u32) -> Interval {
    let w = prec as u64 + 16;
    let one = BigInt::one() << w;
    let three = BigInt::from(3);
    let (sl, sh) = atanh_fixed(&div_floor(&one, &three), &div_ceil(&one, &three), w);
    fixed_to_interval(sl << 1u32, sh << 1u32, w).round(prec)
}

/// `atan(1/n)` as a fixed-point enclosure, alternating series with next-term bracketing.
fn atan_inv_fixed(n: u32, w: u64) -> (BigInt, BigInt) {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let one = BigInt::one() << w;
    let mut pl = div_floor(&one, &n);
    let mut ph = div_ceil(&one, &n);
    let mut sl = BigInt::zero();
    let mut sh = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        let tl = div_floor(&pl, &d);
        let th = div_ceil(&ph, &d);
        if k.is_multiple_of(2) {
            sl += &tl;
            sh += &th;
        } else {
            sl -= &th;
            sh -= &tl;
        }
        pl = div_floor(&pl, &n2);
        ph = div_ceil(&ph, &n2);
        k += 1;
        if ph <= BigInt::one() {
            let next = div_ceil(&ph, &BigInt::from(2 * k + 1)) + 1u32;
            sl -= &next;
            sh += &next;
            break;
        }
    }
    (sl, sh)
}

/// `pi = 16 atan(1/5) - 4 atan(1/239)`.
pub fn pi(prec: u32) -> Interval {
    let w = prec as u64 + 16;
    let (al, ah) = atan_inv_fixed(5, w);
    let (bl, bh) = atan_inv_fixed(239, w);
    let lo = al * 16u32 - bh * 4u32;
    let hi = ah * 16u32 - bl * 4u32;
    fixed_to_interval(lo, hi, w).round(prec)
}

/// Enclosure of `exp(x)` for an exact dyadic `x`.
pub fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::point(Dyadic::one());
    }
    if x.is_negative() {
        let pos = exp_point(&x.neg(), prec + 4);
        let one = Interval::point(Dyadic::one());
        return one.div(&pos, prec).expect("exp is positive").round(prec);
    }
    let mag = x.magnitude();
    let s: u64 = (mag + 8).max(0) as u64;
    let w: u64 = prec as u64 + s + 24;
    // r = x / 2^s with r < 2^-8; r = m * 2^e
    let m = x.mant().clone();
    let e = x.exp() - s as i64;
    let mul_r = |v: &BigInt, dir: Round| -> BigInt {
        let p = v * &m;
        if e >= 0 {
            p << e as u64
        } else {
            match dir {
                Round::Floor => shr_floor(&p, (-e) as u64),
                Round::Ceil => shr_ceil(&p, (-e) as u64),
            }
        }
    };
    let one = BigInt::one() << w;
    let mut tl = one.clone();
    let mut th = one;
    let mut sl = BigInt::zero();
    let mut sh = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        sl += &tl;
        sh += &th;
        k += 1;
        let kk = BigInt::from(k);
        tl = div_floor(&mul_r(&tl, Round::Floor), &kk);
        th = div_ceil(&mul_r(&th, Round::Ceil), &kk);
        if th <= BigInt::one() {
            // tail <= 2 * t_k for r <= 1/2
            sh += &th * 2u32 + 1u32;
            break;
        }
    }
    let mut acc = fixed_to_interval(sl, sh, w);
    let wp = w as u32;
    for _ in 0..s {
        acc = acc.mul(&acc, wp);
    }
    acc.round(prec)
}

/// Enclosure of `ln(x)` for an exact dyadic `x > 0`.
pub fn ln_point(x: &Dyadic, prec: u32) -> Interval {
    assert!(x.is_positive(), "ln of a nonpositive value");
    if *x == Dyadic::one() {
        return Interval::point(Dyadic::zero());
    }
    // x = y * 2^k with y in [3/4, 3/2)
    let mut k = x.magnitude() - 1;
    let mut y = x.shl(-k);
    if y >= Dyadic::new(BigInt::from(3), -1) {
        y = y.shl(-1);
        k += 1;
    }
    let kbits = 64 - (k.unsigned_abs()).leading_zeros() as u64;
    let w = prec as u64 + kbits + 24;
    // z = (y - 1) / (y + 1), |z| <= 1/5
    let (yn, yd) = y.to_ratio();
    let num = &yn - &yd;
    let den = &yn + &yd;
    let neg = num.is_negative();
    let num = num.abs() << w;
    let (sl, sh) = atanh_fixed(&div_floor(&num, &den), &div_ceil(&num, &den), w);
    let (sl, sh) = (sl << 1u32, sh << 1u32);
    let log_y = if neg {
        fixed_to_interval(-sh, -sl, w)
    } else {
        fixed_to_interval(sl, sh, w)
    };
    if k == 0 {
        return log_y.round(prec);
    }
    let l2 = ln2((w + kbits) as u32);
    let kl = Interval::from_int(&BigInt::from(k));
    let p = (w + kbits) as u32;
    l2.mul(&kl, p).add(&log_y, p).round(prec)
}

/// Enclosure of `x^(1/n)` for an exact dyadic `x >= 0`.
pub fn root_point(x: &Dyadic, n: u32, prec: u32) -> Interval {
    assert!(!x.is_negative() && n >= 1);
    if x.is_zero() || n == 1 {
        return Interval::point(x.clone());
    }
    let n64 = n as i64;
    let top = x.magnitude();
    let mut w = prec as i64 + 4 - top.div_euclid(n64);
    let e = x.exp();
    // need e + n*w >= 0
    let min_w = (-e + n64 - 1).div_euclid(n64);
    if w < min_w {
        w = min_w;
    }
    let t = (e + n64 * w) as u64;
    let big = x.mant() << t;
    let f = big.nth_root(n);
    if num_traits::pow(f.clone(), n as usize) == big {
        Interval::point(Dyadic::new(f, -w))
    } else {
        Interval::new(Dyadic::new(f.clone(), -w), Dyadic::new(f + 1u32, -w))
    }
}
