//! Double-double arithmetic (about 32 significant digits) and compensated
//! dot products. Used where results must survive heavy cancellation:
//! discrete-operator identities and iterative refinement residuals.

use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::math::{fma, round};

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product: `a * b = p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, fma(a, b, -p))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact for integers up to about 2^106.
    pub fn from_i128(v: i128) -> Self {
        let hi = v as f64;
        let rest = v - hi as i128;
        let (h, l) = quick_two_sum(hi, rest as f64);
        Dd { hi: h, lo: l }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut e = n;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Nearest integer, ties resolved on the high part.
    pub fn round(self) -> Self {
        let hi = round(self.hi);
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, round(self.lo));
            Dd { hi: h, lo: l }
        } else {
            Dd::new(hi)
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (h, l) = quick_two_sum(p, e);
        Dd { hi: h, lo: l }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (h, l) = quick_two_sum(s1, s2);
        Dd { hi: h, lo: l }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (h, l) = quick_two_sum(p, e);
        Dd { hi: h, lo: l }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::new(q3)
    }
}

/// π to double-double precision.
pub const PI: Dd = Dd {
    hi: core::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn scale(self, s: Dd) -> Self {
        DdComplex::new(self.re * s, self.im * s)
    }

    /// Division by the imaginary number `i·y`.
    pub fn div_imag(self, y: Dd) -> Self {
        DdComplex::new(self.im / y, -self.re / y)
    }

    /// High parts as a `Complex64`.
    pub fn hi(self) -> Complex64 {
        Complex64::new(self.re.hi, self.im.hi)
    }

    /// Low parts as a `Complex64`.
    pub fn lo(self) -> Complex64 {
        Complex64::new(self.re.lo, self.im.lo)
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, b: DdComplex) -> DdComplex {
        DdComplex::new(self.re + b.re, self.im + b.im)
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, b: DdComplex) -> DdComplex {
        DdComplex::new(self.re - b.re, self.im - b.im)
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, b: DdComplex) -> DdComplex {
        DdComplex::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

/// `e^{2πi·turns}` in double-double.
///
/// The argument is reduced to within 1/8 turn of a multiple of 1/4, the
/// remainder goes through Taylor series, and the quarter turns are applied
/// exactly.
pub fn cis_turns(turns: Dd) -> DdComplex {
    let r = turns - turns.round();
    let q = round(4.0 * r.hi);
    let theta = (r - Dd::new(0.25 * q)) * PI.mul_f64(2.0);
    let t2 = theta * theta;
    let mut cos = Dd::ONE;
    let mut sin = theta;
    let mut term_c = Dd::ONE;
    let mut term_s = theta;
    let mut n = 1.0;
    while term_c.hi.abs() > 1e-36 || term_s.hi.abs() > 1e-36 {
        term_c = -(term_c * t2) / Dd::new(n * (n + 1.0));
        term_s = -(term_s * t2) / Dd::new((n + 1.0) * (n + 2.0));
        cos = cos + term_c;
        sin = sin + term_s;
        n += 2.0;
    }
    match (q as i64).rem_euclid(4) {
        0 => DdComplex::new(cos, sin),
        1 => DdComplex::new(-sin, cos),
        2 => DdComplex::new(-cos, -sin),
        _ => DdComplex::new(sin, -cos),
    }
}

/// Dot product accumulated in double-double, rounded once at the end.
pub fn dot2(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = Dd::ZERO;
    for (a, b) in x.iter().zip(y) {
        let (p, e) = two_prod(*a, *b);
        acc = acc + Dd { hi: p, lo: e };
    }
    acc.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_third_round_trips() {
        let t = Dd::ONE / Dd::new(3.0);
        let back = t * Dd::new(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }

    #[test]
    fn dot2_survives_cancellation() {
        let x = [1e16, 1.0, -1e16];
        let y = [1.0, 1.0, 1.0];
        assert_eq!(dot2(&x, &y), 1.0);
    }

    #[test]
    fn cis_matches_libm_and_unit_modulus() {
        for &t in &[0.0, 0.1, 0.25, -0.37, 1.9, 123.456, -7.875] {
            let z = cis_turns(Dd::new(t));
            let a = 2.0 * core::f64::consts::PI * t;
            assert!((z.re.to_f64() - libm::cos(a)).abs() < 1e-13);
            assert!((z.im.to_f64() - libm::sin(a)).abs() < 1e-13);
            let norm = z.re * z.re + z.im * z.im - Dd::ONE;
            assert!(norm.hi.abs() < 1e-30, "t={t}: {norm:?}");
        }
    }

    #[test]
    fn cis_of_exact_fraction() {
        // e^{2πi/12} = (√3/2, 1/2).
        let z = cis_turns(Dd::ONE / Dd::new(12.0));
        assert!((z.im - Dd::new(0.5)).hi.abs() < 1e-31);
        let three_quarters = z.re * z.re - Dd::new(0.75);
        assert!(three_quarters.hi.abs() < 1e-31);
    }

    #[test]
    fn large_integers_are_exact() {
        let v: i128 = (1i128 << 90) + 12345;
        let d = Dd::from_i128(v);
        assert_eq!(d.hi as i128 + d.lo as i128, v);
    }
}
