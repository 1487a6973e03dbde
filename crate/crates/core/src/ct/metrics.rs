use super::ImageGrid;
use crate::math::{abs, log10};
use crate::{Error, Result};

/// Reconstruction error measures against a reference image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub e_max: f64,
    pub mse: f64,
    /// `10 log10(I_max² / MSE)`; `+∞` when the images are identical.
    pub psnr: f64,
    /// Maximum of the evaluated image.
    pub i_max: f64,
}

/// `E_max`, `MSE` and `PSNR` of `image` against `reference` over the whole
/// grid. The peak `I_max` is taken from `image`.
pub fn metrics(image: &ImageGrid, reference: &ImageGrid) -> Result<MetricsReport> {
    metrics_masked(image, reference, false)
}

/// As [`metrics`], optionally restricted to pixels whose centre lies in
/// the unit disk.
pub fn metrics_masked(
    image: &ImageGrid,
    reference: &ImageGrid,
    fov_only: bool,
) -> Result<MetricsReport> {
    if image.n != reference.n {
        return Err(Error::Geometry(alloc::format!(
            "image is {0}x{0} but reference is {1}x{1}",
            image.n,
            reference.n
        )));
    }
    let n = image.n;
    let inside = |k: usize| {
        let (x, y) = (image.x(k % n), image.y(k / n));
        !fov_only || x * x + y * y <= 1.0
    };
    let mut e_max: f64 = 0.0;
    let mut sq = 0.0;
    let mut count = 0usize;
    let mut i_max = f64::NEG_INFINITY;
    for (k, (a, b)) in image.data.iter().zip(&reference.data).enumerate() {
        if !inside(k) {
            continue;
        }
        let d = a - b;
        e_max = e_max.max(abs(d));
        sq += d * d;
        count += 1;
        i_max = i_max.max(*a);
    }
    if count == 0 {
        return Err(Error::Geometry("no pixels to compare".into()));
    }
    let mse = sq / count as f64;
    let psnr = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * log10(i_max * i_max / mse)
    };
    Ok(MetricsReport {
        e_max,
        mse,
        psnr,
        i_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_images() {
        let a = ImageGrid {
            n: 2,
            data: alloc::vec![0.0, 1.0, 2.0, 3.0],
        };
        let m = metrics(&a, &a).unwrap();
        assert_eq!(m.mse, 0.0);
        assert!(m.psnr.is_infinite());
    }

    #[test]
    fn known_values() {
        let a = ImageGrid {
            n: 2,
            data: alloc::vec![1.0, 1.0, 1.0, 2.0],
        };
        let b = ImageGrid {
            n: 2,
            data: alloc::vec![1.0, 1.0, 1.0, 1.0],
        };
        let m = metrics(&a, &b).unwrap();
        assert_eq!(m.e_max, 1.0);
        assert_eq!(m.mse, 0.25);
        assert!((m.psnr - 10.0 * (16.0f64).log10()).abs() < 1e-12);
    }

    #[test]
    fn mask_drops_corners() {
        let a = ImageGrid {
            n: 2,
            data: alloc::vec![5.0, 0.0, 0.0, 0.0],
        };
        let b = ImageGrid::zeros(2);
        // Pixel centres sit at (±1/2, ±1/2), all inside the disk.
        assert_eq!(metrics_masked(&a, &b, true).unwrap().mse, 6.25);
        let mut big = ImageGrid::zeros(8);
        big.data[0] = 1.0;
        let m = metrics_masked(&big, &ImageGrid::zeros(8), true).unwrap();
        assert_eq!(m.e_max, 0.0);
    }

    #[test]
    fn size_mismatch() {
        let a = ImageGrid::zeros(2);
        let b = ImageGrid::zeros(3);
        assert!(metrics(&a, &b).is_err());
    }
}
