//! Convergence studies against integrands with closed-form Fourier integrals.

use serde::Serialize;

use oqf_core::quadrature::{coefficients, exact_moment, QuadratureSpec};
use oqf_core::Complex64;

use crate::report::float;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrand {
    /// `e^x`
    Exp,
    /// `cos x`
    Cos,
    /// `x³`
    Cubic,
}

impl std::str::FromStr for Integrand {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "exp" => Ok(Integrand::Exp),
            "cos" => Ok(Integrand::Cos),
            "cubic" => Ok(Integrand::Cubic),
            _ => Err(CliError::Validation(format!(
                "unknown integrand {s:?}; expected exp, cos or cubic"
            ))),
        }
    }
}

/// `∫ₐᵇ e^{λx} dx`.
fn exp_integral(lambda: Complex64, a: f64, b: f64) -> Complex64 {
    if lambda.norm() < 1e-8 {
        // Taylor expansion avoids 0/0 near λ = 0.
        let l = lambda;
        let moment = |k: i32| (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64;
        return moment(0) + l * moment(1) + l * l * (moment(2) / 2.0);
    }
    ((lambda * b).exp() - (lambda * a).exp()) / lambda
}

impl Integrand {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Integrand::Exp => x.exp(),
            Integrand::Cos => x.cos(),
            Integrand::Cubic => x * x * x,
        }
    }

    /// `∫ₐᵇ e^{2πiωx} φ(x) dx` in closed form.
    pub fn exact(&self, omega: f64, a: f64, b: f64) -> Complex64 {
        let c = Complex64::new(0.0, 2.0 * std::f64::consts::PI * omega);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Integrand::Exp => exp_integral(c + 1.0, a, b),
            Integrand::Cos => 0.5 * (exp_integral(c + i, a, b) + exp_integral(c - i, a, b)),
            Integrand::Cubic => exact_moment(3, omega, a, b),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    #[serde(serialize_with = "float")]
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub m: usize,
    pub integrand: Integrand,
    pub omega: f64,
    pub a: f64,
    pub b: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log h`.
    #[serde(serialize_with = "float")]
    pub order: f64,
}

/// Least-squares slope of `log e` on `log h`.
pub fn fitted_order(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > 0.0)
        .map(|r| (r.h.ln(), r.error.ln()))
        .collect();
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub fn run(
    m: usize,
    integrand: Integrand,
    omega: f64,
    a: f64,
    b: f64,
    ladder: &[usize],
) -> CliResult<ConvergenceStudy> {
    if ladder.len() < 2 {
        return Err(CliError::Validation(
            "the N ladder needs at least two entries".into(),
        ));
    }
    let exact = integrand.exact(omega, a, b);
    let mut rows = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let spec = QuadratureSpec::new(m, omega, a, b, n)?;
        let cv = coefficients(&spec)?;
        let samples: Vec<Complex64> = (0..=n)
            .map(|beta| Complex64::new(integrand.eval(spec.node(beta)), 0.0))
            .collect();
        let approx = cv.apply(&samples)?;
        rows.push(ConvergenceRow {
            n,
            h: spec.step(),
            error: (approx - exact).norm(),
        });
    }
    let order = fitted_order(&rows);
    Ok(ConvergenceStudy {
        m,
        integrand,
        omega,
        a,
        b,
        rows,
        order,
    })
}
