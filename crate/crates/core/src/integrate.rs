//! Gauss–Legendre rules and an adaptive Gauss–Kronrod integrator.
//!
//! These serve as independent reference integrators. The adaptive scheme
//! compares each panel with the sum of its two halves, which also copes with
//! jump discontinuities (line integrals through piecewise-constant phantoms).

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{abs, cos};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if abs(dz) < 1e-16 {
                break;
            }
        }
        x.push(z);
        w.push(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];

fn kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = WGK[7] * f(c);
    for i in 0..7 {
        let dx = r * XGK[i];
        s += WGK[i] * (f(c - dx) + f(c + dx));
    }
    s * r
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Adaptive 15-point Kronrod integration of a real function on `[a, b]`
/// with absolute tolerance `tol`.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> AdaptiveResult {
    const MAX_DEPTH: u32 = 60;
    let whole = kronrod15(&mut f, a, b);
    let mut stack: Vec<(f64, f64, f64, u32, f64)> = Vec::new();
    stack.push((a, b, whole, 0, tol));
    let mut value = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    while let Some((lo, hi, est, depth, t)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = kronrod15(&mut f, lo, mid);
        let right = kronrod15(&mut f, mid, hi);
        let diff = abs(left + right - est);
        if diff <= t || depth >= MAX_DEPTH || mid <= lo || mid >= hi {
            if diff > t {
                converged = false;
            }
            value += left + right;
            err += diff;
        } else {
            stack.push((lo, mid, left, depth + 1, 0.5 * t));
            stack.push((mid, hi, right, depth + 1, 0.5 * t));
        }
    }
    AdaptiveResult {
        value,
        error_estimate: err,
        converged,
    }
}
