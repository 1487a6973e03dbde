//! Thin wrappers over `libm` so the rest of the crate reads like std code.

use core::f64::consts::PI;
use num_complex::Complex64;

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn fma(a: f64, b: f64, c: f64) -> f64 {
    libm::fma(a, b, c)
}

pub fn powi(x: f64, n: u32) -> f64 {
    let mut base = x;
    let mut e = n;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

pub fn cpowi(z: Complex64, n: u32) -> Complex64 {
    let mut base = z;
    let mut e = n;
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `e^{2πi·turns}`, with the argument reduced to `[-1/2, 1/2]` first.
#[inline]
pub fn cis_turns(turns: f64) -> Complex64 {
    let r = turns - round(turns);
    let (s, c) = libm::sincos(2.0 * PI * r);
    Complex64::new(c, s)
}

/// `sin(πx)/(πx)` with the removable singularity filled in.
pub fn sinc_pi(x: f64) -> f64 {
    let px = PI * x;
    if abs(px) < 1e-4 {
        let p2 = px * px;
        1.0 - p2 / 6.0 + p2 * p2 / 120.0
    } else {
        sinpi(x) / px
    }
}

/// `sin(πx)` with exact reduction of the argument modulo 2.
pub fn sinpi(x: f64) -> f64 {
    let r = x - 2.0 * round(0.5 * x);
    sin(PI * r)
}

/// `cos(πx)` with exact reduction of the argument modulo 2.
pub fn cospi(x: f64) -> f64 {
    let r = x - 2.0 * round(0.5 * x);
    cos(PI * r)
}
