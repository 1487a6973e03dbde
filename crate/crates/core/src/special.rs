//! Factorials, binomials, Bernoulli numbers and `ζ` at non-positive integers.

use crate::math::powi;
use core::f64::consts::PI;

/// `n!` as a float. Exact up to `n = 22`.
pub fn factorial(n: usize) -> f64 {
    let mut acc = 1.0;
    for k in 2..=n {
        acc *= k as f64;
    }
    acc
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}

/// Binomial coefficient with overflow checking.
pub fn binomial_i128(n: usize, k: usize) -> Option<i128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as i128)? / (i as i128 + 1);
    }
    Some(acc)
}

/// `B_0 ..= B_20` as exact fractions, with the `B_1 = -1/2` convention.
const BERNOULLI: [(i64, i64); 21] = [
    (1, 1),
    (-1, 2),
    (1, 6),
    (0, 1),
    (-1, 30),
    (0, 1),
    (1, 42),
    (0, 1),
    (-1, 30),
    (0, 1),
    (5, 66),
    (0, 1),
    (-691, 2730),
    (0, 1),
    (7, 6),
    (0, 1),
    (-3617, 510),
    (0, 1),
    (43867, 798),
    (0, 1),
    (-174611, 330),
];

/// Bernoulli number `B_n` (`B_1 = -1/2`). Exact table through `B_20`,
/// the `ζ(2r)` relation beyond.
pub fn bernoulli(n: usize) -> f64 {
    if n < BERNOULLI.len() {
        let (p, q) = BERNOULLI[n];
        return p as f64 / q as f64;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let sign = if (n / 2) % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * factorial(n) * zeta_even(n) / powi(2.0 * PI, n as u32)
}

fn zeta_even(n: usize) -> f64 {
    // n >= 22 here, so eight terms reach full precision.
    let mut s = 0.0;
    for k in (1..=8).rev() {
        s += powi(1.0 / k as f64, n as u32);
    }
    s
}

/// `ζ(-n)` for `n >= 0`.
pub fn zeta_nonpositive(n: usize) -> f64 {
    if n == 0 {
        return -0.5;
    }
    if n.is_multiple_of(2) {
        return 0.0;
    }
    -bernoulli(n + 1) / (n + 1) as f64
}
