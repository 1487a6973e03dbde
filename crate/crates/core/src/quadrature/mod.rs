//! Optimal quadrature weights for `∫ₐᵇ e^{2πiωx} φ(x) dx` on `N+1`
//! equally spaced nodes, optimal in the sense of Sard in `L₂^(m)[a,b]`.
//!
//! Three closed forms cover all real `ω`:
//!
//! * `ω = 0`: real, symmetric weights with boundary layers of `m-1`
//!   geometric modes;
//! * generic `ω`: an interior part `h K_{ω,m} e^{2πiωx_β}` plus boundary
//!   layers whose `2(m-1)` amplitudes solve a small linear system;
//! * `ωh` a nonzero integer: the same system with the interior part gone.
//!
//! For small `|ωh|` the oscillatory formula is rearranged around
//! `κ = 1 - K` and regularised polylogarithms, so the weights tend to the
//! `ω = 0` weights smoothly instead of losing every digit to cancellation.

mod engine;
mod norm;
pub(crate) mod tables;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use engine::{CoefficientEngine, Structure, RESONANCE_TOLERANCE};
pub use norm::{error_norm_zero_omega, ErrorNormReport};

use crate::math::cis_turns;
use crate::{Error, Result, MAX_ORDER};

/// Problem description: order `m`, frequency `ω` (cycles per unit
/// length), interval `[a, b]` and `N` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub m: usize,
    pub omega: f64,
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl QuadratureSpec {
    pub fn new(m: usize, omega: f64, a: f64, b: f64, n: usize) -> Result<Self> {
        let s = QuadratureSpec { m, omega, a, b, n };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > MAX_ORDER {
            return Err(Error::UnsupportedOrder(self.m));
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.b > self.a) {
            return Err(Error::InvalidParameter(alloc::format!(
                "interval needs finite a < b, got [{}, {}]",
                self.a,
                self.b
            )));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "frequency must be finite, got {}",
                self.omega
            )));
        }
        if self.n == 0 || self.n + 1 < self.m {
            return Err(Error::TooFewNodes {
                m: self.m,
                nodes: self.n + 1,
            });
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// Node `x_β = a + βh`.
    pub fn node(&self, beta: usize) -> f64 {
        self.a + (self.b - self.a) * beta as f64 / self.n as f64
    }
}

/// Which closed form produced a coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    ZeroOmega,
    Generic,
    ResonantInteger,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::ZeroOmega => "zero_omega",
            Branch::Generic => "generic",
            Branch::ResonantInteger => "resonant_integer",
        }
    }
}

/// Where a coefficient vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Oracle,
}

/// Weights `C_0 ..= C_N` together with the data that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub spec: QuadratureSpec,
    pub values: Vec<Complex64>,
    pub branch: Branch,
    pub provenance: Provenance,
    pub k_factor: f64,
    /// Boundary-layer amplitudes at the left end (`d_k` when `ω = 0`).
    pub boundary_a: Vec<Complex64>,
    /// Boundary-layer amplitudes at the right end (`d_k` when `ω = 0`).
    pub boundary_b: Vec<Complex64>,
    /// Relative residual of the boundary-layer system.
    pub system_residual: f64,
}

impl CoefficientVector {
    /// `Σ C_β f_β`.
    pub fn apply(&self, samples: &[Complex64]) -> Result<Complex64> {
        if samples.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                actual: samples.len(),
            });
        }
        Ok(self.values.iter().zip(samples).map(|(c, f)| c * f).sum())
    }
}

/// Residual above which an oscillatory or resonant solve is rejected.
pub const SYSTEM_RESIDUAL_LIMIT: f64 = 1e-6;

fn finish(
    spec: &QuadratureSpec,
    engine: &CoefficientEngine,
    s: &Structure,
) -> Result<CoefficientVector> {
    let residual = engine.structure_residual(s);
    if !(residual <= SYSTEM_RESIDUAL_LIMIT) {
        return Err(Error::IllConditioned {
            context: "boundary-layer system",
            residual,
            limit: SYSTEM_RESIDUAL_LIMIT,
        });
    }
    Ok(CoefficientVector {
        spec: *spec,
        values: engine.weights(s),
        branch: s.branch,
        provenance: Provenance::ClosedForm,
        k_factor: s.k_factor,
        boundary_a: s.boundary_a().to_vec(),
        boundary_b: s.boundary_b().to_vec(),
        system_residual: residual,
    })
}

fn engine_for(spec: &QuadratureSpec) -> Result<CoefficientEngine> {
    spec.validate()?;
    CoefficientEngine::new(spec.m, spec.a, spec.b, spec.n)
}

/// Weights for `ω = 0`.
pub fn coefficients_zero_omega(spec: &QuadratureSpec) -> Result<CoefficientVector> {
    if spec.omega != 0.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "zero-frequency formula called with ω = {}",
            spec.omega
        )));
    }
    let e = engine_for(spec)?;
    finish(spec, &e, &e.zero_structure())
}

/// Weights for `ω ≠ 0` with `ωh` away from the nonzero integers.
pub fn coefficients_generic(spec: &QuadratureSpec) -> Result<CoefficientVector> {
    let e = engine_for(spec)?;
    if e.classify(spec.omega) != Branch::Generic {
        return Err(Error::InvalidParameter(alloc::format!(
            "ω = {} is zero or resonant (ωh = {}); the oscillatory formula does not apply",
            spec.omega,
            spec.omega * spec.step()
        )));
    }
    finish(spec, &e, &e.generic_structure(spec.omega))
}

/// Weights for `ωh` a nonzero integer (within [`RESONANCE_TOLERANCE`]).
pub fn coefficients_resonant(spec: &QuadratureSpec) -> Result<CoefficientVector> {
    let e = engine_for(spec)?;
    if e.classify(spec.omega) != Branch::ResonantInteger {
        return Err(Error::InvalidParameter(alloc::format!(
            "ωh = {} is not a nonzero integer",
            spec.omega * spec.step()
        )));
    }
    let k = crate::math::round(spec.omega * e.h);
    finish(spec, &e, &e.resonant_structure(k))
}

/// Weights for any `ω`, dispatching on the branch.
pub fn coefficients(spec: &QuadratureSpec) -> Result<CoefficientVector> {
    let e = engine_for(spec)?;
    finish(spec, &e, &e.structure(spec.omega))
}

/// `K_{ω,m}` for step `h`.
pub fn k_factor(m: usize, omega: f64, h: f64) -> Result<f64> {
    let t = tables::OrderTables::new(m)?;
    Ok(t.k_factor(omega * h))
}

/// Maps weights on `[0, 1]` for `ω(b-a)` to weights on `[a, b]` for `ω`:
/// `C_β[a,b] = (b-a) e^{2πiωa} C_β[0,1]`.
pub fn transform_unit_to_ab(
    unit: &CoefficientVector,
    a: f64,
    b: f64,
    omega: f64,
) -> Result<CoefficientVector> {
    let s = unit.spec;
    if s.a != 0.0 || s.b != 1.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "expected weights on [0, 1], got [{}, {}]",
            s.a,
            s.b
        )));
    }
    let target = QuadratureSpec::new(s.m, omega, a, b, s.n)?;
    let scaled = omega * (b - a);
    if (scaled - s.omega).abs() > 1e-12 * (1.0 + scaled.abs()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "unit weights are for ω = {} but ω(b-a) = {}",
            s.omega,
            scaled
        )));
    }
    let factor = cis_turns(omega * a) * (b - a);
    Ok(CoefficientVector {
        spec: target,
        values: unit.values.iter().map(|c| c * factor).collect(),
        branch: unit.branch,
        provenance: unit.provenance,
        k_factor: unit.k_factor,
        boundary_a: unit.boundary_a.iter().map(|c| c * factor).collect(),
        boundary_b: unit.boundary_b.iter().map(|c| c * factor).collect(),
        system_residual: unit.system_residual,
    })
}

/// `∫ₐᵇ e^{2πiωx} φ(x) dx` from samples `φ(x_0) ..= φ(x_N)`.
pub fn integrate(spec: &QuadratureSpec, samples: &[Complex64]) -> Result<Complex64> {
    if samples.len() != spec.n + 1 {
        return Err(Error::LengthMismatch {
            expected: spec.n + 1,
            actual: samples.len(),
        });
    }
    coefficients(spec)?.apply(samples)
}

/// `∫ₐᵇ e^{2πiωx} x^α dx` in closed form.
pub fn exact_moment(alpha: usize, omega: f64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    let mut s = Complex64::new(0.0, 0.0);
    for r in 0..=alpha {
        let c = crate::special::binomial(alpha, r)
            * crate::math::powi(len, r as u32)
            * crate::math::powi(a, (alpha - r) as u32);
        s += crate::oracle::moment_g(r, omega * len) * c;
    }
    s * cis_turns(omega * a) * len
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_zero_frequency_is_trapezoid() {
        let spec = QuadratureSpec::new(1, 0.0, 0.0, 1.0, 4).unwrap();
        let c = coefficients(&spec).unwrap();
        let expect = [0.125, 0.25, 0.25, 0.25, 0.125];
        for (v, e) in c.values.iter().zip(expect) {
            assert!((v.re - e).abs() < 1e-15 && v.im == 0.0);
        }
    }

    #[test]
    fn branch_guards() {
        let s = QuadratureSpec::new(2, 2.7, 0.0, 1.0, 8).unwrap();
        assert!(coefficients_zero_omega(&s).is_err());
        assert!(coefficients_resonant(&s).is_err());
        let r = QuadratureSpec::new(2, 8.0, 0.0, 1.0, 8).unwrap();
        assert!(coefficients_generic(&r).is_err());
        assert_eq!(
            coefficients_resonant(&r).unwrap().branch,
            Branch::ResonantInteger
        );
    }

    #[test]
    fn too_few_nodes() {
        assert!(matches!(
            QuadratureSpec::new(4, 0.0, 0.0, 1.0, 2),
            Err(Error::TooFewNodes { .. })
        ));
    }

    #[test]
    fn k_factor_reference_values() {
        assert_eq!(k_factor(2, 0.0, 0.1).unwrap(), 1.0);
        let k = k_factor(2, 5.0, 0.1).unwrap();
        let pi4 = core::f64::consts::PI.powi(4);
        assert!((k - 48.0 / pi4).abs() < 1e-12);
    }

    #[test]
    fn transform_rejects_wrong_frequency() {
        let s = QuadratureSpec::new(2, 1.0, 0.0, 1.0, 8).unwrap();
        let c = coefficients(&s).unwrap();
        assert!(transform_unit_to_ab(&c, -1.0, 2.0, 1.0).is_err());
        assert!(transform_unit_to_ab(&c, -1.0, 2.0, 1.0 / 3.0).is_ok());
    }
}
