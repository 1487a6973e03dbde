use alloc::vec;
use alloc::vec::Vec;

use super::ImageGrid;
use crate::math::{cos, sin, sqrt};

/// Uniform ellipse: centre, semi-axes along its own x and y, rotation in
/// degrees (counter-clockwise) and additive intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub x0: f64,
    pub y0: f64,
    pub semi_x: f64,
    pub semi_y: f64,
    pub angle_deg: f64,
    pub intensity: f64,
}

impl Ellipse {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let p = self.angle_deg.to_radians();
        let (s, c) = (sin(p), cos(p));
        let dx = x - self.x0;
        let dy = y - self.y0;
        let u = (dx * c + dy * s) / self.semi_x;
        let v = (-dx * s + dy * c) / self.semi_y;
        u * u + v * v <= 1.0
    }

    /// Line integral along `x cos θ + y sin θ = t`.
    pub fn radon(&self, theta: f64, t: f64) -> f64 {
        let g = theta - self.angle_deg.to_radians();
        let (sg, cg) = (sin(g), cos(g));
        let a2 = self.semi_x * self.semi_x * cg * cg + self.semi_y * self.semi_y * sg * sg;
        let s = t - (self.x0 * cos(theta) + self.y0 * sin(theta));
        if s * s > a2 {
            return 0.0;
        }
        2.0 * self.intensity * self.semi_x * self.semi_y * sqrt(a2 - s * s) / a2
    }
}

/// Sum of uniform ellipses.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsePhantom {
    pub ellipses: Vec<Ellipse>,
}

/// `(x0, y0, A, B, rotation°, intensity)` of the Kak–Slaney variant of the
/// Shepp–Logan head phantom.
pub const SHEPP_LOGAN: [[f64; 6]; 10] = [
    [0.0, 0.0, 0.69, 0.92, 0.0, 2.0],
    [0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98],
    [0.22, 0.0, 0.11, 0.31, -18.0, -0.02],
    [-0.22, 0.0, 0.16, 0.41, 18.0, -0.02],
    [0.0, 0.35, 0.21, 0.25, 0.0, 0.01],
    [0.0, 0.1, 0.046, 0.046, 0.0, 0.01],
    [0.0, -0.1, 0.046, 0.046, 0.0, 0.01],
    [-0.08, -0.605, 0.046, 0.023, 0.0, 0.01],
    [0.0, -0.605, 0.023, 0.023, 0.0, 0.01],
    [0.06, -0.605, 0.023, 0.046, 0.0, 0.01],
];

impl EllipsePhantom {
    pub fn from_table(rows: &[[f64; 6]]) -> Self {
        EllipsePhantom {
            ellipses: rows
                .iter()
                .map(|r| Ellipse {
                    x0: r[0],
                    y0: r[1],
                    semi_x: r[2],
                    semi_y: r[3],
                    angle_deg: r[4],
                    intensity: r[5],
                })
                .collect(),
        }
    }

    pub fn shepp_logan() -> Self {
        Self::from_table(&SHEPP_LOGAN)
    }

    /// Disc of radius 1 and intensity 1.
    pub fn unit_disk() -> Self {
        Self::from_table(&[[0.0, 0.0, 1.0, 1.0, 0.0, 1.0]])
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.ellipses
            .iter()
            .filter(|e| e.contains(x, y))
            .map(|e| e.intensity)
            .sum()
    }

    /// Phantom sampled at pixel centres.
    pub fn rasterize(&self, n: usize) -> ImageGrid {
        let mut img = ImageGrid {
            n,
            data: vec![0.0; n * n],
        };
        for i in 0..n {
            let y = img.y(i);
            for j in 0..n {
                img.data[i * n + j] = self.value(img.x(j), y);
            }
        }
        img
    }
}

/// Exact Radon transform `P(θ, t)` of an ellipse phantom.
pub fn analytic_radon(phantom: &EllipsePhantom, theta: f64, t: f64) -> f64 {
    phantom.ellipses.iter().map(|e| e.radon(theta, t)).sum()
}
