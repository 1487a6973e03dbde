//! Euler–Frobenius polynomials `E_k(x) = Σ a_s x^s` and the finite
//! differences of zero `Δ^i 0^j`.
//!
//! The coefficients are exact integers. Roots are real, simple and negative,
//! and they pair up as `q` and `1/q`; only the ones inside `(-1, 0)` are kept.

use alloc::vec::Vec;

use crate::dd::Dd;
use crate::math::{abs, exp};
use crate::special::binomial_i128;
use crate::{Error, Result};

/// Exact coefficients `a_0 ..= a_k` of `E_k`,
/// `a_s = Σ_{j=0}^{s} (-1)^j C(k+2, j) (s+1-j)^{k+1}`.
pub fn ef_coefficients(k: usize) -> Result<Vec<i128>> {
    let overflow = || Error::Overflow("Euler–Frobenius coefficients");
    let mut out = Vec::with_capacity(k + 1);
    for s in 0..=k {
        let mut acc: i128 = 0;
        for j in 0..=s {
            let c = binomial_i128(k + 2, j).ok_or_else(overflow)?;
            let base = (s + 1 - j) as i128;
            let pw = base.checked_pow((k + 1) as u32).ok_or_else(overflow)?;
            let term = c.checked_mul(pw).ok_or_else(overflow)?;
            acc = if j % 2 == 0 {
                acc.checked_add(term)
            } else {
                acc.checked_sub(term)
            }
            .ok_or_else(overflow)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `Δ^i 0^j = Σ_{l=0}^{i} (-1)^{i-l} C(i,l) l^j`, with `0^0 = 1`.
pub fn delta_zero(i: usize, j: usize) -> Result<i128> {
    let overflow = || Error::Overflow("finite differences of zero");
    let mut acc: i128 = 0;
    for l in 0..=i {
        let pw: i128 = if j == 0 {
            1
        } else {
            (l as i128).checked_pow(j as u32).ok_or_else(overflow)?
        };
        let term = binomial_i128(i, l)
            .ok_or_else(overflow)?
            .checked_mul(pw)
            .ok_or_else(overflow)?;
        acc = if (i - l).is_multiple_of(2) {
            acc.checked_add(term)
        } else {
            acc.checked_sub(term)
        }
        .ok_or_else(overflow)?;
    }
    Ok(acc)
}

/// Roots of `E_k` in `(-1, 0)`, ascending (most negative first).
///
/// `k` must be even and at least 2; there are `k/2` such roots.
pub fn ef_roots_inside(k: usize) -> Result<Vec<f64>> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(alloc::format!(
            "ef_roots_inside needs an even degree >= 2, got {k}"
        )));
    }
    Ok(EfPolynomial::new(k)?.roots_inside)
}

/// `E_k` with its exact coefficients and the roots inside `(-1, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EfPolynomial {
    pub degree: usize,
    pub coeffs: Vec<i128>,
    pub roots_inside: Vec<f64>,
}

impl EfPolynomial {
    pub fn new(k: usize) -> Result<Self> {
        let coeffs = ef_coefficients(k)?;
        let roots_inside = find_roots_inside(&coeffs);
        if roots_inside.len() != k / 2 {
            return Err(Error::Singular("Euler–Frobenius root bracketing"));
        }
        Ok(EfPolynomial {
            degree: k,
            coeffs,
            roots_inside,
        })
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    /// Horner evaluation in double-double.
    pub fn eval_dd(&self, x: Dd) -> Dd {
        let mut acc = Dd::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Dd::from_i128(*c);
        }
        acc
    }

    /// Every root: the inside ones, `-1` for odd degree, and the reciprocals.
    pub fn all_roots(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.roots_inside.clone();
        if self.degree % 2 == 1 {
            r.push(-1.0);
        }
        r.extend(self.roots_inside.iter().map(|q| 1.0 / q));
        r.sort_by(|a, b| a.total_cmp(b));
        r
    }

    /// Inside roots polished to double-double by Newton's method.
    pub fn roots_inside_dd(&self) -> Vec<Dd> {
        let deriv: Vec<i128> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(s, c)| c * s as i128)
            .collect();
        self.roots_inside
            .iter()
            .map(|&q| {
                let mut x = Dd::new(q);
                for _ in 0..3 {
                    let f = self.eval_dd(x);
                    let mut d = Dd::ZERO;
                    for c in deriv.iter().rev() {
                        d = d * x + Dd::from_i128(*c);
                    }
                    x = x - f / d;
                }
                x
            })
            .collect()
    }
}

fn horner(coeffs: &[i128], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + *c as f64)
}

fn horner_deriv(coeffs: &[i128], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (s, c)| acc * x + (*c as f64) * s as f64)
}

/// Brackets sign changes on a logarithmic grid `x = -e^{-s}`, then bisects
/// and finishes with Newton steps.
fn find_roots_inside(coeffs: &[i128]) -> Vec<f64> {
    const SAMPLES: usize = 6000;
    const S_MAX: f64 = 90.0;
    let mut roots = Vec::new();
    let point = |i: usize| -exp(-(1e-9 + S_MAX * i as f64 / SAMPLES as f64));
    let mut x0 = point(0);
    let mut f0 = horner(coeffs, x0);
    for i in 1..=SAMPLES {
        let x1 = point(i);
        let f1 = horner(coeffs, x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f1 != 0.0 && f0.is_sign_negative() != f1.is_sign_negative() {
            roots.push(bisect(coeffs, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn bisect(coeffs: &[i128], mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let neg_lo = f_lo.is_sign_negative();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = horner(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.is_sign_negative() == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if abs(hi - lo) <= 1e-15 * abs(mid) {
            break;
        }
    }
    let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    for _ in 0..2 {
        let d = horner_deriv(coeffs, x);
        if d == 0.0 {
            break;
        }
        let next = x - horner(coeffs, x) / d;
        if next < a || next > b {
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn low_degree_coefficients() {
        assert_eq!(ef_coefficients(0).unwrap(), vec![1]);
        assert_eq!(ef_coefficients(1).unwrap(), vec![1, 1]);
        assert_eq!(ef_coefficients(2).unwrap(), vec![1, 4, 1]);
        assert_eq!(ef_coefficients(3).unwrap(), vec![1, 11, 11, 1]);
        assert_eq!(ef_coefficients(4).unwrap(), vec![1, 26, 66, 26, 1]);
    }

    #[test]
    fn coefficient_sum_is_factorial() {
        for k in 0..=20 {
            let s: i128 = ef_coefficients(k).unwrap().iter().sum();
            let f: i128 = (1..=(k as i128 + 1)).product();
            assert_eq!(s, f, "k = {k}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(ef_coefficients(60), Err(Error::Overflow(_))));
    }

    #[test]
    fn known_roots() {
        let r2 = ef_roots_inside(2).unwrap();
        assert!((r2[0] - (3f64.sqrt() - 2.0)).abs() < 1e-15);
        let r4 = ef_roots_inside(4).unwrap();
        assert!((r4[0] + 0.430_575_347_1).abs() < 1e-9);
        assert!((r4[1] + 0.043_096_288_2).abs() < 1e-9);
    }

    #[test]
    fn odd_degree_is_rejected_for_inside_roots() {
        assert!(ef_roots_inside(3).is_err());
        assert!(ef_roots_inside(0).is_err());
    }

    #[test]
    fn odd_degree_has_minus_one() {
        let p = EfPolynomial::new(5).unwrap();
        let all = p.all_roots();
        assert_eq!(all.len(), 5);
        assert!(all.iter().any(|r| (*r + 1.0).abs() < 1e-15));
    }

    #[test]
    fn delta_zero_small_values() {
        assert_eq!(delta_zero(0, 0).unwrap(), 1);
        assert_eq!(delta_zero(3, 0).unwrap(), 0);
        assert_eq!(delta_zero(1, 1).unwrap(), 1);
        assert_eq!(delta_zero(2, 3).unwrap(), 6);
        assert_eq!(delta_zero(3, 3).unwrap(), 6);
        assert_eq!(delta_zero(4, 3).unwrap(), 0);
    }

    #[test]
    fn dd_roots_are_sharper() {
        let p = EfPolynomial::new(10).unwrap();
        for q in p.roots_inside_dd() {
            let r = p.eval_dd(q).to_f64().abs();
            assert!(r < 1e-20, "residual {r}");
        }
    }
}
