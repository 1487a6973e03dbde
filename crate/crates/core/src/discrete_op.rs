//! The discrete analogue `D_m(hβ)` of the operator `d^{2m}/dx^{2m}` and the
//! fundamental solution `G_m(x) = |x|^{2m-1} / (2 (2m-1)!)` it inverts.
//!
//! Writing `D_m(hβ) = p · d(β)` with `p = (2m-1)!/h^{2m}` leaves a
//! dimensionless sequence `d(β)` that is independent of `h`. The
//! verification routines work with `d` in double-double: the convolution
//! `h Σ_γ D_m(hγ) G_m(hβ - hγ) = Σ_γ d(γ) |β-γ|^{2m-1} / 2` cancels terms of
//! size `|β|^{2m-1}` down to `δ(β)`, far beyond what plain doubles can carry.

use alloc::vec::Vec;

use crate::dd::Dd;
use crate::efpoly::EfPolynomial;
use crate::math::{ceil, ln, powi};
use crate::special::factorial;
use crate::{Error, Result, MAX_ORDER};

/// `G_m(x) = |x|^{2m-1} / (2 (2m-1)!)`.
pub fn g_kernel(m: usize, x: f64) -> f64 {
    let k = 2 * m - 1;
    powi(x.abs(), k as u32) / (2.0 * factorial(k))
}

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub m: usize,
    pub h: f64,
    /// `(2m-1)! / h^{2m}`.
    pub p: f64,
    /// `C = -2^{2m-1}`.
    pub c: f64,
    /// Roots `q_k` of `E_{2m-2}` inside `(-1, 0)`.
    pub roots: Vec<f64>,
    /// `A_k = (1 - q_k)^{2m+1} / E_{2m-1}(q_k)`.
    pub a: Vec<f64>,
    roots_dd: Vec<Dd>,
    a_dd: Vec<Dd>,
}

/// Outcome of the convolution check `h D_m * G_m = δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionReport {
    pub window: usize,
    /// Largest `|h Σ D G - δ|` over `|β| <= window/2`.
    pub max_residual: f64,
    pub worst_beta: i64,
    /// Whether `max |q_k|^window < 1e-14`, so truncation is negligible.
    pub window_sufficient: bool,
}

impl DiscreteOperator {
    pub fn new(m: usize, h: f64) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(Error::UnsupportedOrder(m));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "step h must be positive and finite, got {h}"
            )));
        }
        let (roots, roots_dd) = if m >= 2 {
            let e = EfPolynomial::new(2 * m - 2)?;
            (e.roots_inside.clone(), e.roots_inside_dd())
        } else {
            (Vec::new(), Vec::new())
        };
        let odd = EfPolynomial {
            degree: 2 * m - 1,
            coeffs: crate::efpoly::ef_coefficients(2 * m - 1)?,
            roots_inside: Vec::new(),
        };
        let a_dd: Vec<Dd> = roots_dd
            .iter()
            .map(|&q| (Dd::ONE - q).powi(2 * m as u32 + 1) / odd.eval_dd(q))
            .collect();
        Ok(DiscreteOperator {
            m,
            h,
            p: factorial(2 * m - 1) / powi(h, 2 * m as u32),
            c: -powi(2.0, 2 * m as u32 - 1),
            roots,
            a: a_dd.iter().map(|v| v.to_f64()).collect(),
            roots_dd,
            a_dd,
        })
    }

    /// Dimensionless `d(β) = D_m(hβ) / p`.
    fn scaled_dd(&self, beta: i64) -> Dd {
        let b = beta.unsigned_abs();
        match b {
            0 => {
                let mut s = Dd::new(self.c);
                for (a, q) in self.a_dd.iter().zip(&self.roots_dd) {
                    s = s + *a / *q;
                }
                s
            }
            1 => {
                let mut s = Dd::ONE;
                for a in &self.a_dd {
                    s = s + *a;
                }
                s
            }
            _ => {
                let mut s = Dd::ZERO;
                for (a, q) in self.a_dd.iter().zip(&self.roots_dd) {
                    s = s + *a * q.powi((b - 1) as u32);
                }
                s
            }
        }
    }

    /// `D_m(hβ)`.
    pub fn d_discrete(&self, beta: i64) -> f64 {
        self.scaled_dd(beta).to_f64() * self.p
    }

    /// Smallest window with `max |q_k|^window < 1e-14`, at least 8 and at
    /// most 10⁴.
    pub fn default_window(&self) -> usize {
        let qmax = self.roots.iter().fold(0.0f64, |a, q| a.max(q.abs()));
        if qmax == 0.0 {
            return 8;
        }
        let w = ceil(ln(1e-14) / ln(qmax)) as usize + 1;
        w.clamp(8, 10_000)
    }

    fn window_sufficient(&self, window: usize) -> bool {
        let qmax = self.roots.iter().fold(0.0f64, |a, q| a.max(q.abs()));
        powi(qmax, window as u32) < 1e-14
    }

    /// Checks `h Σ_{|γ|<=W} D_m(hγ) G_m(hβ - hγ) = δ(β)` for `|β| <= W/2`.
    pub fn verify_convolution(&self, window: usize) -> ConvolutionReport {
        let w = window as i64;
        let d: Vec<Dd> = (-w..=w).map(|g| self.scaled_dd(g)).collect();
        let k = (2 * self.m - 1) as u32;
        let mut max_residual = 0.0f64;
        let mut worst_beta = 0;
        for beta in -(w / 2)..=(w / 2) {
            let mut s = Dd::ZERO;
            for (idx, g) in (-w..=w).enumerate() {
                let dist = Dd::new((beta - g).unsigned_abs() as f64).powi(k);
                s = s + d[idx] * dist;
            }
            let mut r = s.mul_f64(0.5);
            if beta == 0 {
                r = r - Dd::ONE;
            }
            let r = r.to_f64().abs();
            if r > max_residual {
                max_residual = r;
                worst_beta = beta;
            }
        }
        ConvolutionReport {
            window,
            max_residual,
            worst_beta,
            window_sufficient: self.window_sufficient(window),
        }
    }

    /// `Σ_{|β|<=W} D_m(hβ) (hβ)^k`.
    pub fn verify_moments(&self, k: usize, window: usize) -> f64 {
        let w = window as i64;
        let mut s = Dd::ZERO;
        for beta in -w..=w {
            let pw = if k == 0 {
                Dd::ONE
            } else {
                Dd::new(beta as f64).powi(k as u32)
            };
            s = s + self.scaled_dd(beta) * pw;
        }
        s.to_f64() * self.p * powi(self.h, k as u32)
    }

    /// What [`Self::verify_moments`] should return: `0` for `k < 2m`,
    /// `(2m)!` for `k = 2m`.
    pub fn expected_moment(&self, k: usize) -> Option<f64> {
        if k < 2 * self.m {
            Some(0.0)
        } else if k == 2 * self.m {
            Some(factorial(2 * self.m))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_is_the_second_difference() {
        let op = DiscreteOperator::new(1, 0.5).unwrap();
        assert_eq!(op.d_discrete(0), -8.0);
        assert_eq!(op.d_discrete(1), 4.0);
        assert_eq!(op.d_discrete(-1), 4.0);
        assert_eq!(op.d_discrete(2), 0.0);
    }

    #[test]
    fn operator_is_even() {
        let op = DiscreteOperator::new(3, 0.1).unwrap();
        for b in 0..20 {
            assert_eq!(op.d_discrete(b), op.d_discrete(-b));
        }
    }

    #[test]
    fn convolution_m2() {
        let op = DiscreteOperator::new(2, 0.1).unwrap();
        let r = op.verify_convolution(200);
        assert!(r.window_sufficient);
        assert!(r.max_residual < 1e-8, "{r:?}");
    }

    #[test]
    fn moments_m3() {
        let op = DiscreteOperator::new(3, 0.05).unwrap();
        let w = 400;
        assert!(op.verify_moments(3, w).abs() < 1e-7);
        let top = op.verify_moments(6, w);
        assert!((top - 720.0).abs() < 1e-9 * 720.0);
    }

    #[test]
    fn short_window_is_flagged() {
        let op = DiscreteOperator::new(3, 0.1).unwrap();
        assert!(!op.verify_convolution(10).window_sufficient);
        assert!(op.default_window() >= 38);
    }

    #[test]
    fn kernel() {
        assert_eq!(g_kernel(1, -3.0), 1.5);
        assert_eq!(g_kernel(2, 2.0), 8.0 / 12.0);
    }
}
