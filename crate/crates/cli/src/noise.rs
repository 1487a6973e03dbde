//! Photon-counting noise on sinograms.

use oqf_core::ct::Sinogram;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    /// Negative entries set to zero before sampling.
    pub clamped: usize,
    /// Photon count assigned to a bin holding the sinogram mean.
    pub mean_count: f64,
}

/// Poisson noise with relative standard deviation `level` at the mean.
///
/// The data are scaled so that the mean bin expects `λ̄ = 1/level²`
/// photons, each bin is replaced by a Poisson draw, and the counts are
/// scaled back. The generator is ChaCha8 seeded with `seed`, so equal seeds
/// give bit-identical output.
pub fn add_poisson_noise(
    sino: &Sinogram,
    level: f64,
    seed: u64,
) -> CliResult<(Sinogram, NoiseReport)> {
    if !(level > 0.0 && level <= 1.0) {
        return Err(CliError::Validation(format!(
            "noise level must lie in (0, 1], got {level}"
        )));
    }
    let mut clamped = 0;
    let mut values: Vec<f64> = sino
        .values
        .iter()
        .map(|&v| {
            if v < 0.0 {
                clamped += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    let mean_count = 1.0 / (level * level);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean > 0.0 {
        let scale = mean_count / mean;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in values.iter_mut() {
            let lambda = *v * scale;
            if lambda > 0.0 {
                let draw = Poisson::new(lambda)
                    .map_err(|e| CliError::Numerical(format!("Poisson({lambda}): {e}")))?;
                *v = draw.sample(&mut rng) / scale;
            }
        }
    }
    Ok((
        Sinogram::new(sino.n_angles, sino.n_detectors, values)?,
        NoiseReport {
            clamped,
            mean_count,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(value: f64, len: usize) -> Sinogram {
        Sinogram::new(1, len, vec![value; len]).unwrap()
    }

    #[test]
    fn relative_std_matches_level() {
        let s = flat(3.0, 10_000);
        let (noisy, rep) = add_poisson_noise(&s, 0.1, 11).unwrap();
        assert!((rep.mean_count - 100.0).abs() < 1e-12);
        let mean = noisy.values.iter().sum::<f64>() / 1e4;
        let var = noisy.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 9999.0;
        let rel = var.sqrt() / 3.0;
        // Standard error of a sample std over 10⁴ draws is about 0.7%.
        assert!((rel - 0.1).abs() < 0.004, "relative std {rel}");
        assert!((mean / 3.0 - 1.0).abs() < 0.004);
    }

    #[test]
    fn same_seed_same_bits() {
        let s = flat(1.5, 257);
        let a = add_poisson_noise(&s, 0.1, 7).unwrap().0;
        let b = add_poisson_noise(&s, 0.1, 7).unwrap().0;
        let c = add_poisson_noise(&s, 0.1, 8).unwrap().0;
        assert!(a
            .values
            .iter()
            .zip(&b.values)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn vanishing_level_recovers_input() {
        let s = Sinogram::new(2, 3, vec![0.5, 1.0, 2.0, 0.0, 1.5, 3.0]).unwrap();
        let (noisy, _) = add_poisson_noise(&s, 1e-5, 1).unwrap();
        for (a, b) in noisy.values.iter().zip(&s.values) {
            assert!((a - b).abs() < 1e-3 * (1.0 + b));
        }
    }

    #[test]
    fn negatives_are_clamped_and_counted() {
        let s = Sinogram::new(1, 4, vec![-1.0, 2.0, -0.5, 1.0]).unwrap();
        let (noisy, rep) = add_poisson_noise(&s, 0.5, 3).unwrap();
        assert_eq!(rep.clamped, 2);
        assert_eq!(noisy.values[0], 0.0);
        assert_eq!(noisy.values[2], 0.0);
    }

    #[test]
    fn level_outside_range_rejected() {
        let s = flat(1.0, 4);
        for level in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                add_poisson_noise(&s, level, 0),
                Err(CliError::Validation(_))
            ));
        }
    }
}
