use super::CoefficientEngine;
use crate::math::powi;
use crate::special::{bernoulli, factorial};
use crate::Result;

/// Squared norm of the error functional of the `ω = 0` formula on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNormReport {
    pub m: usize,
    pub n: usize,
    pub h: f64,
    /// `‖ℓ‖²`.
    pub norm_sq: f64,
    /// Leading term `(-1)^{m+1} h^{2m} B_{2m} / (2m)!`.
    pub leading: f64,
    /// Boundary-layer correction, of order `h^{2m+1}`.
    pub boundary: f64,
}

/// `‖ℓ‖² = (-1)^{m+1} [h^{2m} B_{2m}/(2m)!
///   + 2h^{2m+1}/(2m)! Σ_k d_k Σ_{i=1}^{2m} (-q_k^{N+i} + (-1)^i q_k)/(1-q_k)^{i+1} Δ^i0^{2m}]`.
pub fn error_norm_zero_omega(m: usize, n: usize) -> Result<ErrorNormReport> {
    let e = CoefficientEngine::new(m, 0.0, 1.0, n)?;
    let h = e.h;
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let f2m = factorial(2 * m);
    let leading = sign * powi(h, 2 * m as u32) * bernoulli(2 * m) / f2m;
    let mut acc = 0.0;
    for (k, &q) in e.roots().iter().enumerate() {
        let d = e.zero_branch_d()[k];
        let qn = powi(q, n as u32);
        let mut inner = 0.0;
        for i in 1..=2 * m {
            let alt = if i % 2 == 0 { 1.0 } else { -1.0 };
            inner += (-qn * powi(q, i as u32) + alt * q) / powi(1.0 - q, i as u32 + 1)
                * e.tables.delta[i][2 * m];
        }
        acc += d * inner;
    }
    let boundary = sign * 2.0 * powi(h, 2 * m as u32 + 1) / f2m * acc;
    Ok(ErrorNormReport {
        m,
        n,
        h,
        norm_sq: leading + boundary,
        leading,
        boundary,
    })
}
