use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{pixel_x, ImageGrid, Sinogram};
use crate::fourier::{dft_ramp_filter, Dft, ForwardOperator, FrequencyGrid, InverseOperator};
use crate::math::{cis_turns, cos, floor, sin};
use crate::{Error, Result};

/// Views back-projected together into one partial image. Partial images
/// are then summed pairwise in a fixed tree, so the result does not depend
/// on how blocks are scheduled.
pub const VIEW_BLOCK: usize = 8;

/// How projections are ramp-filtered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbpMethod {
    /// Zero-padded DFT, ramp `|ω_k|`, linear interpolation between detectors.
    DftBaseline,
    /// Optimal weights of order `m` for the forward transform and for the
    /// filtered inverse, evaluated exactly at every pixel.
    Optimal { m: usize },
}

impl FbpMethod {
    pub fn name(&self) -> &'static str {
        match self {
            FbpMethod::DftBaseline => "dft",
            FbpMethod::Optimal { .. } => "oqf",
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            FbpMethod::DftBaseline => None,
            FbpMethod::Optimal { m } => Some(*m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbpConfig {
    pub image_size: usize,
    pub method: FbpMethod,
    /// Frequency nodes per detector interval: the band `[-W, W]`,
    /// `W = 1/(2Δt)`, gets `M = oversampling · N` subintervals.
    pub oversampling: usize,
}

impl FbpConfig {
    pub fn new(image_size: usize, method: FbpMethod) -> Self {
        FbpConfig {
            image_size,
            method,
            oversampling: 4,
        }
    }
}

enum Filter {
    Dft {
        dft: Dft,
    },
    Optimal {
        forward: ForwardOperator,
        inverse: InverseOperator,
    },
}

/// Prepared filtered back-projection for one sinogram geometry.
pub struct Reconstructor<'a> {
    sino: &'a Sinogram,
    config: FbpConfig,
    filter: Filter,
    xs: Vec<f64>,
}

/// Partial back-projection of a block of views.
#[derive(Debug, Clone)]
pub struct PartialImage {
    pub data: Vec<f64>,
    /// Largest `|Im Q| / max|Re Q|` seen on the sampled diagnostic points.
    pub max_imag_ratio: f64,
}

impl<'a> Reconstructor<'a> {
    pub fn new(sino: &'a Sinogram, config: FbpConfig) -> Result<Self> {
        if config.image_size == 0 {
            return Err(Error::Geometry("image size must be positive".into()));
        }
        if config.oversampling == 0 {
            return Err(Error::InvalidParameter(
                "oversampling must be at least 1".into(),
            ));
        }
        let n = sino.n_detectors - 1;
        let dt = sino.detector_step();
        let filter = match config.method {
            FbpMethod::DftBaseline => {
                let len = (2 * sino.n_detectors).next_power_of_two();
                Filter::Dft { dft: Dft::new(len) }
            }
            FbpMethod::Optimal { m } => {
                let grid = FrequencyGrid::new(0.5 / dt, config.oversampling * n)?;
                Filter::Optimal {
                    forward: ForwardOperator::new(m, -1.0, 1.0, n, grid)?,
                    inverse: InverseOperator::new(m, grid)?,
                }
            }
        };
        let xs = (0..config.image_size)
            .map(|j| pixel_x(config.image_size, j))
            .collect();
        Ok(Reconstructor {
            sino,
            config,
            filter,
            xs,
        })
    }

    pub fn block_count(&self) -> usize {
        self.sino.n_angles.div_ceil(VIEW_BLOCK)
    }

    /// Midpoint used by the fixed reduction tree over `[lo, hi)`.
    pub fn split(lo: usize, hi: usize) -> usize {
        lo + (hi - lo) / 2
    }

    /// Back-projects views `b·VIEW_BLOCK ..` of block `b`, unscaled.
    pub fn backproject_block(&self, block: usize) -> Result<PartialImage> {
        let n = self.config.image_size;
        let mut out = PartialImage {
            data: vec![0.0; n * n],
            max_imag_ratio: 0.0,
        };
        let lo = block * VIEW_BLOCK;
        let hi = (lo + VIEW_BLOCK).min(self.sino.n_angles);
        for k in lo..hi {
            match &self.filter {
                Filter::Dft { dft } => self.view_dft(dft, k, &mut out.data)?,
                Filter::Optimal { forward, inverse } => {
                    let r = self.view_optimal(forward, inverse, k, &mut out.data)?;
                    out.max_imag_ratio = out.max_imag_ratio.max(r);
                }
            }
        }
        Ok(out)
    }

    /// Sums blocks `[lo, hi)` with the fixed pairwise tree, sequentially.
    pub fn reduce_range(&self, lo: usize, hi: usize) -> Result<PartialImage> {
        if hi - lo == 1 {
            return self.backproject_block(lo);
        }
        let mid = Self::split(lo, hi);
        let a = self.reduce_range(lo, mid)?;
        let b = self.reduce_range(mid, hi)?;
        Ok(merge(a, b))
    }

    /// Applies the `π/K` factor to a fully reduced image.
    pub fn finish(&self, total: PartialImage) -> ImageGrid {
        let scale = PI / self.sino.n_angles as f64;
        ImageGrid {
            n: self.config.image_size,
            data: total.data.into_iter().map(|v| v * scale).collect(),
        }
    }

    pub fn reconstruct(&self) -> Result<(ImageGrid, f64)> {
        let total = self.reduce_range(0, self.block_count())?;
        let imag = total.max_imag_ratio;
        Ok((self.finish(total), imag))
    }

    fn view_dft(&self, dft: &Dft, k: usize, acc: &mut [f64]) -> Result<()> {
        let dt = self.sino.detector_step();
        let q = dft_ramp_filter(dft, self.sino.row(k), dt)?;
        let th = self.sino.angle(k);
        let (c, s) = (cos(th), sin(th));
        let n = self.config.image_size;
        let last = q.len() - 1;
        for i in 0..n {
            let ys = -self.xs[i] * s;
            for j in 0..n {
                let t = self.xs[j] * c + ys;
                let u = (t + 1.0) / dt;
                if !(u >= 0.0 && u <= last as f64) {
                    continue;
                }
                let idx = (floor(u) as usize).min(last - 1);
                let f = u - idx as f64;
                acc[i * n + j] += q[idx] * (1.0 - f) + q[idx + 1] * f;
            }
        }
        Ok(())
    }

    fn view_optimal(
        &self,
        forward: &ForwardOperator,
        inverse: &InverseOperator,
        k: usize,
        acc: &mut [f64],
    ) -> Result<f64> {
        let spectrum = forward.apply_real(self.sino.row(k))?;
        let prepared = inverse.prepare(&spectrum.values)?;
        let grid = inverse.grid;
        let th = self.sino.angle(k);
        let (c, s) = (cos(th), sin(th));
        let n = self.config.image_size;
        let l = grid.intervals - 1;
        let ww = 2 * l;

        // Interior sums Re Σ_{n=1}^{M-1} e^{2πi(x c + y s)ω_n} F_n for all pixels
        // as one real product [Re Y, -Im Y] · [Re G; Im G]ᵀ, G = F ∘ X.
        let mut ay = vec![0.0; n * ww];
        let mut bx = vec![0.0; n * ww];
        let omega1 = grid.omega(1);
        let dw = grid.step();
        for (row, &p) in self.xs.iter().enumerate() {
            let ty = -p * s;
            let tx = p * c;
            let stepy = cis_turns(ty * dw);
            let stepx = cis_turns(tx * dw);
            let mut py = Complex64::new(0.0, 0.0);
            let mut px = Complex64::new(0.0, 0.0);
            for idx in 0..l {
                if idx % 64 == 0 {
                    let w = omega1 + dw * idx as f64;
                    py = cis_turns(ty * w);
                    px = cis_turns(tx * w);
                } else {
                    py *= stepy;
                    px *= stepx;
                }
                ay[row * ww + idx] = py.re;
                ay[row * ww + l + idx] = -py.im;
                let g = px * prepared.filtered[idx + 1];
                bx[row * ww + idx] = g.re;
                bx[row * ww + l + idx] = g.im;
            }
        }
        let mut re_t = vec![0.0; n * n];
        // SAFETY: the slices hold n·ww and n·n elements and the strides
        // describe row-major n × ww, its transpose, and row-major n × n.
        unsafe {
            matrixmultiply::dgemm(
                n,
                ww,
                n,
                1.0,
                ay.as_ptr(),
                ww as isize,
                1,
                bx.as_ptr(),
                1,
                ww as isize,
                0.0,
                re_t.as_mut_ptr(),
                n as isize,
                1,
            );
        }
        for i in 0..n {
            let ys = -self.xs[i] * s;
            for j in 0..n {
                let t = self.xs[j] * c + ys;
                let st = inverse.structure(t);
                let q =
                    inverse.evaluate_with_sum(&prepared, &st, Complex64::new(re_t[i * n + j], 0.0));
                acc[i * n + j] += q.re;
            }
        }

        // The filtered projection is real in exact arithmetic; sample the
        // imaginary part at a few detector positions as a diagnostic.
        let mut max_re: f64 = 0.0;
        let mut max_im: f64 = 0.0;
        for idx in 0..9 {
            let t = -1.0 + 0.25 * idx as f64;
            let q = inverse.evaluate(&prepared, t);
            max_re = max_re.max(q.re.abs());
            max_im = max_im.max(q.im.abs());
        }
        Ok(if max_re > 0.0 {
            max_im / max_re
        } else {
            max_im
        })
    }
}

/// Adds two partial images.
pub fn merge(mut a: PartialImage, b: PartialImage) -> PartialImage {
    for (x, y) in a.data.iter_mut().zip(&b.data) {
        *x += y;
    }
    a.max_imag_ratio = a.max_imag_ratio.max(b.max_imag_ratio);
    a
}

/// Filtered back-projection of `sino` onto an `n × n` grid.
pub fn fbp_reconstruct(sino: &Sinogram, method: FbpMethod, n: usize) -> Result<ImageGrid> {
    let r = Reconstructor::new(sino, FbpConfig::new(n, method))?;
    Ok(r.reconstruct()?.0)
}
