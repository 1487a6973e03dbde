//! Reference weights from the bordered linear system that characterises
//! the optimal formula directly:
//!
//! ```text
//! Σ_γ C_γ G_m(hβ - hγ) + Σ_α p_α (hβ)^α = f_m(hβ),   β = 0..N
//! Σ_γ C_γ (hγ)^α                        = g_α,       α = 0..m-1
//! ```
//!
//! on `[0, 1]`, where `f_m(s) = ∫₀¹ e^{2πiωx} G_m(x - s) dx` and
//! `g_α = ∫₀¹ e^{2πiωx} x^α dx`. The system is badly conditioned (about
//! `10^11` at `m = 3, N = 32`), so its entries are formed in double-double,
//! it is factored in double with full pivoting, and refinement runs against
//! residuals of the unrounded double-double system. Use it for `N <= 64`
//! only.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dd::{cis_turns, Dd, DdComplex, PI};
use crate::linalg::{solve_refined_split, Matrix, Pivoting};
use crate::quadrature::{
    transform_unit_to_ab, Branch, CoefficientEngine, CoefficientVector, Provenance, QuadratureSpec,
};
use crate::special::factorial;
use crate::{Error, Result};

/// Largest `N` the oracle accepts.
pub const ORACLE_MAX_N: usize = 64;
/// Refinement sweeps; each gains about `16 - log10(cond)` digits.
const REFINEMENT_STEPS: usize = 4;
/// Relative solve residual above which the oracle reports failure.
pub const ORACLE_RESIDUAL_LIMIT: f64 = 1e-10;

/// `g_α = ∫₀¹ e^{2πiωx} x^α dx`, rounded from [`moment_g_dd`].
pub fn moment_g(alpha: usize, omega: f64) -> Complex64 {
    moment_g_dd(alpha, Dd::new(omega)).to_c64()
}

/// `g_α` in double-double.
///
/// Power series for `|2πω| <= 4`, the integration-by-parts recurrence
/// `g_α = (e^c - α g_{α-1}) / c` above, with `c = 2πiω`.
pub fn moment_g_dd(alpha: usize, omega: Dd) -> DdComplex {
    if omega.hi == 0.0 {
        return DdComplex::new(Dd::ONE / Dd::new((alpha + 1) as f64), Dd::ZERO);
    }
    let y = omega * PI.mul_f64(2.0);
    if y.hi.abs() <= 4.0 {
        moment_series(alpha, y)
    } else {
        moment_recurrence(alpha, omega, y)
    }
}

/// `Σ (iy)^n / (n! (n + α + 1))`.
fn moment_series(alpha: usize, y: Dd) -> DdComplex {
    let mut term = Dd::ONE;
    let mut s = DdComplex::ZERO;
    for n in 0..200 {
        let contrib = term / Dd::new((n + alpha + 1) as f64);
        match n % 4 {
            0 => s.re = s.re + contrib,
            1 => s.im = s.im + contrib,
            2 => s.re = s.re - contrib,
            _ => s.im = s.im - contrib,
        }
        if n > 4 && contrib.hi.abs() < 1e-36 {
            break;
        }
        term = term * y / Dd::new((n + 1) as f64);
    }
    s
}

fn moment_recurrence(alpha: usize, omega: Dd, y: Dd) -> DdComplex {
    let ec = cis_turns(omega);
    let mut g = (ec - DdComplex::new(Dd::ONE, Dd::ZERO)).div_imag(y);
    for k in 1..=alpha {
        g = (ec - g.scale(Dd::new(k as f64))).div_imag(y);
    }
    g
}

/// `f_m(s) = ∫₀¹ e^{2πiωx} G_m(x - s) dx` at `s = β/N`, rounded from
/// [`rhs_f_dd`].
pub fn rhs_f(m: usize, omega: f64, beta: usize, n: usize) -> Complex64 {
    rhs_f_dd(m, omega, beta, n).to_c64()
}

/// `f_m(β/N)` in double-double.
///
/// Splitting the kernel at `s` and substituting `u = x - s` gives
/// `e^{2πiωs} / (2k!) · [(1-s)^{k+1} g_k(ω(1-s)) + s^{k+1} g_k(-ωs)]`
/// with `k = 2m - 1`. Both terms are free of cancellation. Double-double
/// matters here because the bordered system amplifies even rounding-level
/// errors in `f` by about its condition number.
pub fn rhs_f_dd(m: usize, omega: f64, beta: usize, n: usize) -> DdComplex {
    let nd = Dd::new(n as f64);
    let s = Dd::new(beta as f64) / nd;
    let r = Dd::new((n - beta) as f64) / nd;
    let k = 2 * m - 1;
    let right = moment_g_dd(k, r.mul_f64(omega)).scale(r.powi(k as u32 + 1));
    let left = moment_g_dd(k, -s.mul_f64(omega)).scale(s.powi(k as u32 + 1));
    let denom = Dd::ONE / Dd::new(2.0 * factorial(k));
    (cis_turns(s.mul_f64(omega)) * (right + left)).scale(denom)
}

/// Oracle weights with the polynomial multipliers and solve diagnostics.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub coefficients: CoefficientVector,
    /// Lagrange multipliers `p_0 ..= p_{m-1}`.
    pub poly: Vec<Complex64>,
    pub condition_number: f64,
    pub residual: f64,
}

/// Solves the bordered system on `[0, 1]` for `ω` and `N <= 64`.
pub fn solve_oracle(m: usize, omega: f64, n: usize) -> Result<OracleSolution> {
    let spec = QuadratureSpec::new(m, omega, 0.0, 1.0, n)?;
    if n > ORACLE_MAX_N {
        return Err(Error::InvalidParameter(alloc::format!(
            "oracle limited to N <= {ORACLE_MAX_N}, got {n}"
        )));
    }
    let size = n + 1 + m;
    let mut a = Matrix::zeros(size);
    let mut a_lo = Matrix::zeros(size);
    let mut rhs = vec![Complex64::new(0.0, 0.0); size];
    let mut rhs_lo = vec![Complex64::new(0.0, 0.0); size];
    let k = 2 * m - 1;
    let nd = Dd::new(n as f64);
    // G_m((β-γ)/N) = |β-γ|^k / (2 k! N^k), exact numerator.
    let g_denom = Dd::new(2.0 * factorial(k)) * nd.powi(k as u32);
    let put = |mat: &mut Matrix, lo: &mut Matrix, i: usize, j: usize, v: Dd| {
        mat.set(i, j, Complex64::new(v.hi, 0.0));
        lo.set(i, j, Complex64::new(v.lo, 0.0));
    };
    for beta in 0..=n {
        for gamma in 0..=n {
            let d = beta.abs_diff(gamma) as i128;
            let v = Dd::from_i128(d.pow(k as u32)) / g_denom;
            put(&mut a, &mut a_lo, beta, gamma, v);
        }
        let x = Dd::new(beta as f64) / nd;
        for al in 0..m {
            let v = x.powi(al as u32);
            put(&mut a, &mut a_lo, beta, n + 1 + al, v);
            put(&mut a, &mut a_lo, n + 1 + al, beta, v);
        }
        let f = rhs_f_dd(m, omega, beta, n);
        rhs[beta] = f.hi();
        rhs_lo[beta] = f.lo();
    }
    for al in 0..m {
        let g = moment_g_dd(al, Dd::new(omega));
        rhs[n + 1 + al] = g.hi();
        rhs_lo[n + 1 + al] = g.lo();
    }
    let sol = solve_refined_split(
        &a,
        Some(&a_lo),
        &rhs,
        Some(&rhs_lo),
        Pivoting::Full,
        REFINEMENT_STEPS,
        true,
    )?;
    if !(sol.relative_residual <= ORACLE_RESIDUAL_LIMIT) {
        return Err(Error::IllConditioned {
            context: "oracle system",
            residual: sol.relative_residual,
            limit: ORACLE_RESIDUAL_LIMIT,
        });
    }
    let branch = CoefficientEngine::new(m, 0.0, 1.0, n)
        .map(|e| e.classify(omega))
        .unwrap_or(Branch::Generic);
    let coefficients = CoefficientVector {
        spec,
        values: sol.x[..=n].to_vec(),
        branch,
        provenance: Provenance::Oracle,
        k_factor: f64::NAN,
        boundary_a: Vec::new(),
        boundary_b: Vec::new(),
        system_residual: sol.relative_residual,
    };
    Ok(OracleSolution {
        coefficients,
        poly: sol.x[n + 1..].to_vec(),
        condition_number: sol.condition_number.unwrap_or(f64::NAN),
        residual: sol.relative_residual,
    })
}

/// Oracle weights on `[a, b]`, via the `[0, 1]` solve at `ω(b-a)`.
pub fn solve_oracle_ab(m: usize, omega: f64, a: f64, b: f64, n: usize) -> Result<OracleSolution> {
    let mut sol = solve_oracle(m, omega * (b - a), n)?;
    sol.coefficients = transform_unit_to_ab(&sol.coefficients, a, b, omega)?;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete_op::g_kernel;
    use crate::integrate::adaptive;

    #[test]
    fn moment_branches_agree() {
        // Both evaluation paths at the switch point.
        let w = Dd::new(4.0 / (2.0 * core::f64::consts::PI));
        let y = w * PI.mul_f64(2.0);
        for al in 0..12 {
            let a = moment_series(al, y).to_c64();
            let b = moment_recurrence(al, w, y).to_c64();
            assert!((a - b).norm() < 1e-13 * a.norm(), "alpha {al}: {a} vs {b}");
        }
    }

    #[test]
    fn moment_against_adaptive() {
        for &w in &[0.3, 2.7, -5.1] {
            for al in 0..6 {
                let re = adaptive(
                    |x| libm::cos(2.0 * core::f64::consts::PI * w * x) * x.powi(al as i32),
                    0.0,
                    1.0,
                    1e-15,
                );
                let im = adaptive(
                    |x| libm::sin(2.0 * core::f64::consts::PI * w * x) * x.powi(al as i32),
                    0.0,
                    1.0,
                    1e-15,
                );
                let g = moment_g(al, w);
                assert!((g.re - re.value).abs() < 1e-13 && (g.im - im.value).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rhs_against_adaptive() {
        for &(m, w) in &[(1, 2.7), (2, 0.4), (3, -8.1), (3, 1.0), (2, 0.0)] {
            for beta in [0usize, 3, 8] {
                let n = 8;
                let s = beta as f64 / n as f64;
                let two_pi = 2.0 * core::f64::consts::PI;
                let re = adaptive(
                    |x| libm::cos(two_pi * w * x) * g_kernel(m, x - s),
                    0.0,
                    1.0,
                    1e-15,
                );
                let im = adaptive(
                    |x| libm::sin(two_pi * w * x) * g_kernel(m, x - s),
                    0.0,
                    1.0,
                    1e-15,
                );
                let f = rhs_f(m, w, beta, n);
                assert!(
                    (f.re - re.value).abs() < 1e-11 && (f.im - im.value).abs() < 1e-11,
                    "m={m} w={w} beta={beta}: {f} vs {} {}",
                    re.value,
                    im.value
                );
            }
        }
    }

    #[test]
    fn oracle_rejects_large_n() {
        assert!(solve_oracle(2, 1.0, 65).is_err());
    }
}
