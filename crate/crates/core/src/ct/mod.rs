//! Parallel-beam CT: ellipse phantoms with analytic Radon transforms,
//! sinograms, filtered back-projection and image metrics.
//!
//! Geometry: the object lives in the unit square `[-1, 1]²`. View `k` of
//! `K` is at angle `θ_k = kπ/K`; detector `j` of `N+1` sits at
//! `t_j = -1 + 2j/N`. Image pixel `(i, j)` of an `n × n` grid has centre
//! `x_j = -1 + (j + 1/2)·2/n`, `y_i = 1 - (i + 1/2)·2/n`, so row 0 is the top.

mod fbp;
mod metrics;
mod phantom;
mod sinogram;

pub use fbp::{
    fbp_reconstruct, merge, FbpConfig, FbpMethod, PartialImage, Reconstructor, VIEW_BLOCK,
};
pub use metrics::{metrics, metrics_masked, MetricsReport};
pub use phantom::{analytic_radon, Ellipse, EllipsePhantom, SHEPP_LOGAN};
pub use sinogram::{make_sinogram, Sinogram};

use alloc::vec::Vec;

/// Square image, row-major, row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub n: usize,
    pub data: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(n: usize) -> Self {
        ImageGrid {
            n,
            data: alloc::vec![0.0; n * n],
        }
    }

    /// Centre of column `j`.
    pub fn x(&self, j: usize) -> f64 {
        pixel_x(self.n, j)
    }

    /// Centre of row `i`.
    pub fn y(&self, i: usize) -> f64 {
        -pixel_x(self.n, i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn pixel_x(n: usize, j: usize) -> f64 {
    -1.0 + (2 * j + 1) as f64 / n as f64
}
