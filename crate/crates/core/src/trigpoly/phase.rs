//! Exact phase reduction for `e(h x) = exp(2πi h x)`.
//!
//! Frequencies reach 2^62, so `h * x` in floating point would lose every
//! digit of the fractional part. Instead the binary expansion of `x` is
//! multiplied by `h` in 128-bit integer arithmetic and only the fractional
//! bits are kept. The trigonometric functions then only ever see arguments
//! in [-π/4, π/4].

use num_complex::Complex64;
use std::f64::consts::TAU;

/// 2^-k for 0 <= k <= 1074, exact (subnormal results included).
fn pow2_neg(k: u32) -> f64 {
    if k <= 1022 {
        f64::from_bits(((1023 - k) as u64) << 52)
    } else if k <= 1074 {
        f64::from_bits(1u64 << (1074 - k))
    } else {
        0.0
    }
}

/// Fractional part of `x`, mapped into [0, 1).
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `frac(h * x)` computed exactly and rounded once.
pub fn frac_mul(h: u64, x: f64) -> f64 {
    let x = wrap_unit(x);
    if x == 0.0 || h == 0 {
        return 0.0;
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if raw_exp == 0 {
        (frac_bits, -1074i64)
    } else {
        (frac_bits | (1u64 << 52), raw_exp - 1075)
    };
    // x = mant * 2^exp with exp <= -53 since x < 1.
    let k = (-exp) as u32;
    let prod = (h as u128) * (mant as u128);
    let kept = if k >= 128 { prod } else { prod & ((1u128 << k) - 1) };
    let r = (kept as f64) * pow2_neg(k.min(1074));
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `e(t)` for `t` measured in turns, with octant reduction.
#[inline]
pub fn cis_turns(t: f64) -> Complex64 {
    let t = wrap_unit(t);
    let quarter = (t * 4.0).round();
    let r = t - quarter * 0.25;
    let (s, c) = (TAU * r).sin_cos();
    match (quarter as i64) & 3 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// `e(h x)` with exact argument reduction.
#[inline]
pub fn unit(h: u64, x: f64) -> Complex64 {
    cis_turns(frac_mul(h, x))
}

/// `e(j / n)` for `j = 0..n`.
pub fn roots_of_unity(n: u64) -> Vec<Complex64> {
    (0..n).map(|j| cis_turns(j as f64 / n as f64)).collect()
}
