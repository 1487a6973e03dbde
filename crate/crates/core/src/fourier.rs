//! Forward Fourier transform of sampled data and the ramp-filtered inverse,
//! both evaluated with the optimal weights, plus a plain DFT baseline.
//!
//! Convention: `S(ω) = ∫ P(t) e^{-2πiωt} dt` and
//! `Q(t) = ∫ S(ω) |ω| e^{2πiωt} dω`, so the forward transform uses the
//! weights for frequency `-ω` and the inverse uses the weights for
//! "frequency" `t` over the band `[-W, W]`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{abs, cis_turns};
use crate::quadrature::{CoefficientEngine, QuadratureSpec, Structure};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Samples of `P` at `a + βh`, `β = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub a: f64,
    pub b: f64,
    pub values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(a: f64, b: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "a signal needs at least two samples".into(),
            ));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter(alloc::format!(
                "signal interval needs a < b, got [{a}, {b}]"
            )));
        }
        Ok(SampledSignal { a, b, values })
    }

    pub fn from_real(a: f64, b: f64, values: &[f64]) -> Result<Self> {
        Self::new(
            a,
            b,
            values.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
        )
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.intervals() as f64
    }
}

/// Frequencies `ω_n = -W + n·2W/M`, `n = 0..=M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub omega_max: f64,
    pub intervals: usize,
}

impl FrequencyGrid {
    pub fn new(omega_max: f64, intervals: usize) -> Result<Self> {
        if !(omega_max > 0.0 && omega_max.is_finite()) || intervals == 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "frequency grid needs W > 0 and M >= 1, got W = {omega_max}, M = {intervals}"
            )));
        }
        Ok(FrequencyGrid {
            omega_max,
            intervals,
        })
    }

    /// `ω_n`; the middle node of an even grid is exactly zero.
    pub fn omega(&self, n: usize) -> f64 {
        let m = self.intervals as f64;
        self.omega_max * ((2 * n) as f64 - m) / m
    }

    pub fn step(&self) -> f64 {
        2.0 * self.omega_max / self.intervals as f64
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Spectrum values on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
}

/// `S(ω_n) = Σ_β C_β(-ω_n) P_β` for every grid frequency.
pub fn forward_transform(
    signal: &SampledSignal,
    grid: &FrequencyGrid,
    m: usize,
) -> Result<SpectrumGrid> {
    ForwardOperator::new(m, signal.a, signal.b, signal.intervals(), *grid)?.apply(&signal.values)
}

/// `Q(t) = Σ_n C_n(t) S_n |ω_n|` with the weights of the band `[-W, W]`.
pub fn filtered_inverse(spectrum: &SpectrumGrid, t: f64, m: usize) -> Result<Complex64> {
    let op = InverseOperator::new(m, spectrum.grid)?;
    let prepared = op.prepare(&spectrum.values)?;
    Ok(op.evaluate(&prepared, t))
}

/// Forward transform with its weight matrix built once and reused.
#[derive(Debug, Clone)]
pub struct ForwardOperator {
    pub m: usize,
    pub grid: FrequencyGrid,
    pub n_samples: usize,
    a: f64,
    b: f64,
    /// Row `n` holds `C_β(-ω_n)`.
    weights: Vec<Complex64>,
}

impl ForwardOperator {
    pub fn new(m: usize, a: f64, b: f64, intervals: usize, grid: FrequencyGrid) -> Result<Self> {
        QuadratureSpec::new(m, 0.0, a, b, intervals)?;
        let engine = CoefficientEngine::new(m, a, b, intervals)?;
        let ns = intervals + 1;
        let mut weights = vec![ZERO; grid.len() * ns];
        for n in 0..grid.len() {
            let s = engine.structure(-grid.omega(n));
            for beta in 0..ns {
                weights[n * ns + beta] = engine.weight(&s, beta);
            }
        }
        Ok(ForwardOperator {
            m,
            grid,
            n_samples: ns,
            a,
            b,
            weights,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Weights `C_β(-ω_n)` for one frequency.
    pub fn row(&self, n: usize) -> &[Complex64] {
        &self.weights[n * self.n_samples..(n + 1) * self.n_samples]
    }

    pub fn apply(&self, samples: &[Complex64]) -> Result<SpectrumGrid> {
        if samples.len() != self.n_samples {
            return Err(Error::LengthMismatch {
                expected: self.n_samples,
                actual: samples.len(),
            });
        }
        let values = (0..self.grid.len())
            .map(|n| self.row(n).iter().zip(samples).map(|(c, p)| c * p).sum())
            .collect();
        Ok(SpectrumGrid {
            grid: self.grid,
            values,
        })
    }

    pub fn apply_real(&self, samples: &[f64]) -> Result<SpectrumGrid> {
        if samples.len() != self.n_samples {
            return Err(Error::LengthMismatch {
                expected: self.n_samples,
                actual: samples.len(),
            });
        }
        let values = (0..self.grid.len())
            .map(|n| {
                let mut acc = ZERO;
                for (c, p) in self.row(n).iter().zip(samples) {
                    acc += c * *p;
                }
                acc
            })
            .collect();
        Ok(SpectrumGrid {
            grid: self.grid,
            values,
        })
    }
}

/// Ramp-filtered spectrum `F_n = S_n |ω_n|` with its boundary moments.
#[derive(Debug, Clone)]
pub struct PreparedSpectrum {
    pub filtered: Vec<Complex64>,
    pm: [Complex64; crate::MAX_ORDER - 1],
    rm: [Complex64; crate::MAX_ORDER - 1],
}

/// Filtered inverse over the band, evaluated from per-`t` structures.
///
/// A single evaluation costs `O(M)` for the interior trigonometric sum plus
/// `O(m)`; callers that can produce the interior sums in bulk (for example
/// with a matrix product) pass them to [`InverseOperator::evaluate_with_sum`].
#[derive(Debug, Clone)]
pub struct InverseOperator {
    pub m: usize,
    pub grid: FrequencyGrid,
    engine: CoefficientEngine,
}

impl InverseOperator {
    pub fn new(m: usize, grid: FrequencyGrid) -> Result<Self> {
        let engine = CoefficientEngine::new(m, -grid.omega_max, grid.omega_max, grid.intervals)?;
        Ok(InverseOperator { m, grid, engine })
    }

    pub fn engine(&self) -> &CoefficientEngine {
        &self.engine
    }

    pub fn prepare(&self, spectrum: &[Complex64]) -> Result<PreparedSpectrum> {
        if spectrum.len() != self.grid.len() {
            return Err(Error::LengthMismatch {
                expected: self.grid.len(),
                actual: spectrum.len(),
            });
        }
        let filtered: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(n, s)| s * abs(self.grid.omega(n)))
            .collect();
        let (pm, rm) = self.engine.boundary_moments(&filtered);
        Ok(PreparedSpectrum { filtered, pm, rm })
    }

    /// `Σ_{n=1}^{M-1} e^{2πitω_n} F_n`.
    pub fn interior_sum(&self, p: &PreparedSpectrum, t: f64) -> Complex64 {
        let mm = self.grid.intervals;
        let step = cis_turns(t * self.grid.step());
        let mut acc = ZERO;
        let mut ph = ZERO;
        for n in 1..mm {
            // Reseed the phasor now and then to bound drift.
            if (n - 1) % 64 == 0 {
                ph = cis_turns(t * self.grid.omega(n));
            } else {
                ph *= step;
            }
            acc += ph * p.filtered[n];
        }
        acc
    }

    pub fn structure(&self, t: f64) -> Structure {
        self.engine.structure(t)
    }

    /// `Q(t)` given the interior sum for `t`.
    pub fn evaluate_with_sum(
        &self,
        p: &PreparedSpectrum,
        s: &Structure,
        interior: Complex64,
    ) -> Complex64 {
        let mm = self.grid.intervals;
        let mut v = s.first * p.filtered[0] + s.last * p.filtered[mm];
        if s.k_factor != 0.0 {
            v += interior * s.k_factor;
        }
        for k in 0..s.n_roots {
            v += s.a[k] * p.pm[k] + s.b[k] * p.rm[k];
        }
        v * self.engine.h
    }

    /// `Q(t)`.
    pub fn evaluate(&self, p: &PreparedSpectrum, t: f64) -> Complex64 {
        let s = self.structure(t);
        let sum = if s.k_factor != 0.0 {
            self.interior_sum(p, t)
        } else {
            ZERO
        };
        self.evaluate_with_sum(p, &s, sum)
    }

    /// `Q(t)` from the explicit weight vector, for cross-checking.
    pub fn evaluate_direct(&self, p: &PreparedSpectrum, t: f64) -> Complex64 {
        let s = self.structure(t);
        self.engine
            .weights(&s)
            .iter()
            .zip(&p.filtered)
            .map(|(c, f)| c * f)
            .sum()
    }
}

/// Direct DFT of any length with an exact twiddle table.
#[derive(Debug, Clone)]
pub struct Dft {
    len: usize,
    twiddles: Vec<Complex64>,
}

impl Dft {
    pub fn new(len: usize) -> Self {
        let twiddles = (0..len)
            .map(|k| cis_turns(-(k as f64) / len as f64))
            .collect();
        Dft { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `X_k = Σ_j x_j e^{-2πijk/L}`.
    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.transform(x, false)
    }

    /// `x_j = (1/L) Σ_k X_k e^{2πijk/L}`.
    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / self.len as f64;
        self.transform(x, true)
            .into_iter()
            .map(|v| v * scale)
            .collect()
    }

    fn transform(&self, x: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let l = self.len;
        (0..l)
            .map(|k| {
                let mut acc = ZERO;
                let mut idx = 0usize;
                for xj in x.iter().take(l) {
                    let w = self.twiddles[idx];
                    acc += xj * if inverse { w.conj() } else { w };
                    idx += k;
                    if idx >= l {
                        idx -= l;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Ramp filter of one projection by the zero-padded DFT: transform, multiply
/// by `|ω_k|` on the DFT frequency grid, transform back, keep the first
/// `len` samples.
pub fn dft_ramp_filter(dft: &Dft, samples: &[f64], dt: f64) -> Result<Vec<f64>> {
    let l = dft.len();
    if samples.len() > l {
        return Err(Error::LengthMismatch {
            expected: l,
            actual: samples.len(),
        });
    }
    let mut padded = vec![ZERO; l];
    for (d, s) in padded.iter_mut().zip(samples) {
        *d = Complex64::new(*s, 0.0);
    }
    let mut spec = dft.forward(&padded);
    for (k, v) in spec.iter_mut().enumerate() {
        let kk = if k <= l / 2 {
            k as f64
        } else {
            k as f64 - l as f64
        };
        *v *= abs(kk) / (l as f64 * dt);
    }
    Ok(dft
        .inverse(&spec)
        .into_iter()
        .take(samples.len())
        .map(|v| v.re)
        .collect())
}
