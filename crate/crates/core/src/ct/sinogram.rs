use alloc::vec::Vec;
use core::f64::consts::PI;

use super::phantom::{analytic_radon, EllipsePhantom};
use crate::{Error, Result};

/// Parallel-beam projections, one row per view, angle-major.
///
/// View `k` is at `θ_k = kπ/K`; detector `j` at `t_j = -1 + 2j/(n_detectors-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub n_angles: usize,
    pub n_detectors: usize,
    pub values: Vec<f64>,
}

impl Sinogram {
    pub fn new(n_angles: usize, n_detectors: usize, values: Vec<f64>) -> Result<Self> {
        if n_angles == 0 || n_detectors < 2 {
            return Err(Error::Geometry(alloc::format!(
                "need at least one view and two detectors, got {n_angles} x {n_detectors}"
            )));
        }
        if values.len() != n_angles * n_detectors {
            return Err(Error::LengthMismatch {
                expected: n_angles * n_detectors,
                actual: values.len(),
            });
        }
        Ok(Sinogram {
            n_angles,
            n_detectors,
            values,
        })
    }

    pub fn angle(&self, k: usize) -> f64 {
        k as f64 * PI / self.n_angles as f64
    }

    pub fn detector(&self, j: usize) -> f64 {
        -1.0 + 2.0 * j as f64 / (self.n_detectors - 1) as f64
    }

    pub fn detector_step(&self) -> f64 {
        2.0 / (self.n_detectors - 1) as f64
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.n_detectors..(k + 1) * self.n_detectors]
    }
}

/// Samples the analytic Radon transform on the standard geometry.
pub fn make_sinogram(
    phantom: &EllipsePhantom,
    n_angles: usize,
    n_detectors: usize,
) -> Result<Sinogram> {
    let mut s = Sinogram::new(
        n_angles,
        n_detectors,
        alloc::vec![0.0; n_angles * n_detectors],
    )?;
    for k in 0..n_angles {
        let th = s.angle(k);
        for j in 0..n_detectors {
            s.values[k * n_detectors + j] = analytic_radon(phantom, th, s.detector(j));
        }
    }
    Ok(s)
}
