//! Per-order constants shared by every coefficient computation: roots of
//! `E_{2m-2}`, the `K` factor and its small-argument series, finite
//! differences of zero and the series of the regularised polylogarithms.

use num_complex::Complex64;

use crate::efpoly::{delta_zero, ef_coefficients, EfPolynomial};
use crate::math::{abs, cis_turns, cospi, powi, sinc_pi, sinpi};
use crate::special::{factorial, zeta_nonpositive};
use crate::{Error, Result, MAX_ORDER};

pub(crate) const MAX_ROOTS: usize = MAX_ORDER - 1;
const KS: usize = 32;
const PL: usize = 44;
/// `|πωh|` below which `1 - K` comes from its series.
const KAPPA_SERIES_LIMIT: f64 = 0.75;
/// `|2πωh|` below which the regularised polylogarithms come from series.
const POLYLOG_SERIES_LIMIT: f64 = 1.5;

#[derive(Debug, Clone)]
pub(crate) struct OrderTables {
    pub m: usize,
    pub n_roots: usize,
    pub roots: [f64; MAX_ROOTS],
    /// Coefficients of `E_{2m-2}` as floats (exact for `m <= 6`).
    ef_even: [f64; 2 * MAX_ORDER - 1],
    /// Series of `1 - K` in powers of `(πωh)²`.
    kappa: [f64; KS],
    /// `ζ(-j-k)/k!` for `j < m`, `k < PL`.
    polylog: [[f64; PL]; MAX_ORDER],
    /// `Δ^t 0^j` for `t, j <= 2m`.
    pub delta: [[f64; 2 * MAX_ORDER + 1]; 2 * MAX_ORDER + 1],
}

impl OrderTables {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(Error::UnsupportedOrder(m));
        }
        let mut roots = [0.0; MAX_ROOTS];
        if m >= 2 {
            let e = EfPolynomial::new(2 * m - 2)?;
            roots[..m - 1].copy_from_slice(&e.roots_inside);
        }
        let mut ef_even = [0.0; 2 * MAX_ORDER - 1];
        for (dst, c) in ef_even.iter_mut().zip(ef_coefficients(2 * m - 2)?) {
            *dst = c as f64;
        }
        let mut delta = [[0.0; 2 * MAX_ORDER + 1]; 2 * MAX_ORDER + 1];
        for (t, row) in delta.iter_mut().enumerate().take(2 * m + 1) {
            for (j, v) in row.iter_mut().enumerate().take(2 * m + 1) {
                *v = delta_zero(t, j)? as f64;
            }
        }
        let mut polylog = [[0.0; PL]; MAX_ORDER];
        for (j, row) in polylog.iter_mut().enumerate().take(m) {
            for (k, v) in row.iter_mut().enumerate() {
                *v = zeta_nonpositive(j + k) / factorial(k);
            }
        }
        let mut t = OrderTables {
            m,
            n_roots: m - 1,
            roots,
            ef_even,
            kappa: [0.0; KS],
            polylog,
            delta,
        };
        t.kappa = t.kappa_series_raw();
        for c in t.kappa.iter_mut().take(m) {
            *c = 0.0;
        }
        Ok(t)
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots[..self.n_roots]
    }

    /// Denominator `2 Σ_{α<m-1} a_α cos(2πωh(m-1-α)) + a_{m-1}`.
    fn k_denominator(&self, wh: f64) -> f64 {
        let m = self.m;
        let mut d = self.ef_even[m - 1];
        for al in 0..m - 1 {
            d += 2.0 * self.ef_even[al] * cospi(2.0 * wh * (m - 1 - al) as f64);
        }
        d
    }

    /// `K_{ω,m}` as a function of `ωh`.
    pub fn k_factor(&self, wh: f64) -> f64 {
        if wh == 0.0 {
            return 1.0;
        }
        let s = sinc_pi(wh);
        powi(s, 2 * self.m as u32) * factorial(2 * self.m - 1) / self.k_denominator(wh)
    }

    /// Series of `1 - K` in `s = (πωh)²` before the leading terms are
    /// zeroed. Those terms vanish analytically because `K = 1 + O((ωh)^{2m})`.
    pub fn kappa_series_raw(&self) -> [f64; KS] {
        let m = self.m;
        let mut sinc = [0.0; KS];
        for (n, v) in sinc.iter_mut().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign / factorial(2 * n + 1);
        }
        let mut num = [0.0; KS];
        num[0] = 1.0;
        for _ in 0..2 * m {
            let mut next = [0.0; KS];
            for i in 0..KS {
                for k in 0..=i {
                    next[i] += num[k] * sinc[i - k];
                }
            }
            num = next;
        }
        let fm = factorial(2 * m - 1);
        let mut den = [0.0; KS];
        den[0] = self.ef_even[m - 1];
        for al in 0..m - 1 {
            let c = 2.0 * (m - 1 - al) as f64;
            for (n, v) in den.iter_mut().enumerate() {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                *v += 2.0 * self.ef_even[al] * sign * powi(c, 2 * n as u32) / factorial(2 * n);
            }
        }
        let mut k = [0.0; KS];
        for i in 0..KS {
            let mut acc = num[i] * fm;
            for j in 0..i {
                acc -= k[j] * den[i - j];
            }
            k[i] = acc / den[0];
        }
        let mut kappa = [0.0; KS];
        for i in 0..KS {
            kappa[i] = -k[i];
        }
        kappa[0] += 1.0;
        kappa
    }

    /// `κ = 1 - K`, accurate also when `K` is within rounding of 1.
    pub fn kappa(&self, wh: f64) -> f64 {
        let x = core::f64::consts::PI * wh;
        if abs(x) < KAPPA_SERIES_LIMIT {
            let s = x * x;
            let mut acc = 0.0;
            for c in self.kappa.iter().rev() {
                acc = acc * s + c;
            }
            acc
        } else {
            1.0 - self.k_factor(wh)
        }
    }

    /// `L⁺_j(u) = Λ_j(e^u) - j!(-u)^{-j-1}` at `u = 2πi·wh`.
    ///
    /// Here `Λ_j(x) = Σ_{t=1}^{j} Δ^t0^j x^t / (1-x)^{t+1}` and
    /// `Λ_0(x) = 1/(1-x)`. For imaginary `u` the companion
    /// `L⁻_j(u) = Λ_j(e^{-u}) - j!/u^{j+1}` is the complex conjugate.
    pub fn polylog_plus(&self, j: usize, wh: f64) -> Complex64 {
        let y = 2.0 * core::f64::consts::PI * wh;
        if abs(y) < POLYLOG_SERIES_LIMIT {
            // Σ c_k (iy)^k, split into even and odd powers.
            let c = &self.polylog[j];
            let y2 = y * y;
            let mut even = 0.0;
            let mut odd = 0.0;
            for k in (0..PL / 2).rev() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                even = even * y2 + sign * c[2 * k];
                odd = odd * y2 + sign * c[2 * k + 1];
            }
            let mut v = Complex64::new(even, odd * y);
            if j == 0 {
                v += 1.0;
            }
            v
        } else {
            // 1 - e^{iy} = -2i sin(y/2) e^{iy/2}
            let one_minus_z = Complex64::new(0.0, -2.0 * sinpi(wh)) * cis_turns(0.5 * wh);
            let z = cis_turns(wh);
            let inv = one_minus_z.inv();
            let lam = if j == 0 {
                inv
            } else {
                let ratio = z * inv;
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pw = inv;
                for t in 1..=j {
                    pw *= ratio;
                    acc += pw * self.delta[t][j];
                }
                acc
            };
            // (-u)^{-j-1} with u = iy
            let neg_u = Complex64::new(0.0, -y);
            lam - crate::math::cpowi(neg_u, j as u32 + 1).inv() * factorial(j)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_is_one_plus_high_order() {
        for m in 1..=MAX_ORDER {
            let t = OrderTables::new(m).unwrap();
            let raw = t.kappa_series_raw();
            for (i, c) in raw.iter().take(m).enumerate() {
                assert!(c.abs() < 1e-13, "m={m} coefficient {i} = {c}");
            }
        }
    }

    #[test]
    fn kappa_series_meets_direct_formula() {
        for m in 1..=4 {
            let t = OrderTables::new(m).unwrap();
            for wh in [0.1, 0.2, 0.238] {
                let direct = 1.0 - t.k_factor(wh);
                let series = t.kappa(wh);
                assert!(
                    (direct - series).abs() < 1e-14,
                    "m={m} wh={wh}: {direct} vs {series}"
                );
            }
        }
    }

    #[test]
    fn polylog_series_meets_direct_formula() {
        let t = OrderTables::new(4).unwrap();
        for j in 0..4 {
            // Evaluate just inside and just outside the series limit.
            let a = t.polylog_plus(j, 1.49 / (2.0 * core::f64::consts::PI));
            let b = t.polylog_plus(j, 1.51 / (2.0 * core::f64::consts::PI));
            assert!((a - b).norm() < 0.05, "j={j}");
        }
    }

    #[test]
    fn polylog_series_exact_crosscheck() {
        let t = OrderTables::new(4).unwrap();
        let wh = 0.2;
        let y = 2.0 * core::f64::consts::PI * wh;
        // direct evaluation at the same point, bypassing the series
        for j in 0..4 {
            let z = Complex64::new(0.0, y).exp();
            let lam = if j == 0 {
                (Complex64::new(1.0, 0.0) - z).inv()
            } else {
                (1..=j)
                    .map(|s| {
                        z.powu(s as u32) / (Complex64::new(1.0, 0.0) - z).powu(s as u32 + 1)
                            * t.delta[s][j]
                    })
                    .sum()
            };
            let direct = lam - Complex64::new(0.0, -y).powu(j as u32 + 1).inv() * factorial(j);
            let series = t.polylog_plus(j, wh);
            assert!(
                (direct - series).norm() < 1e-12,
                "j={j}: {direct} vs {series}"
            );
        }
    }
}
