//! Property tests for the structural invariants of each module. Reference
//! values are computed here independently of the library.

use std::f64::consts::PI;

use proptest::prelude::*;

use oqf_core::ct::{analytic_radon, make_sinogram, metrics, Ellipse, EllipsePhantom, ImageGrid};
use oqf_core::discrete_op::{g_kernel, DiscreteOperator};
use oqf_core::efpoly::{delta_zero, ef_coefficients, EfPolynomial};
use oqf_core::fourier::{forward_transform, FrequencyGrid, SampledSignal};
use oqf_core::quadrature::{coefficients, k_factor, transform_unit_to_ab, Branch, QuadratureSpec};
use oqf_core::Complex64;

fn cexp(z: Complex64) -> Complex64 {
    Complex64::from_polar(z.re.exp(), z.im)
}

/// `∫ₐᵇ e^{cx} x^α dx` with `c = 2πiω`: Taylor series in `c` for small
/// `|c|·max(|a|,|b|)`, the repeated-integration-by-parts antiderivative
/// otherwise.
fn moment(alpha: usize, omega: f64, a: f64, b: f64) -> Complex64 {
    let c = Complex64::new(0.0, 2.0 * PI * omega);
    let reach = a.abs().max(b.abs());
    if c.norm() * reach <= 2.0 {
        let mut s = Complex64::new(0.0, 0.0);
        let mut cn = Complex64::new(1.0, 0.0);
        for n in 0..80 {
            let p = (alpha + n + 1) as i32;
            s += cn * (b.powi(p) - a.powi(p)) / p as f64;
            cn = cn * c / (n + 1) as f64;
        }
        return s;
    }
    let anti = |x: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut fall = 1.0;
        for j in 0..=alpha {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * fall * x.powi((alpha - j) as i32) / c.powi(j as i32 + 1);
            fall *= (alpha - j) as f64;
        }
        cexp(c * x) * acc
    };
    anti(b) - anti(a)
}

fn max_diff(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn binom(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

#[test]
fn ef_palindromic_up_to_12() {
    for k in 0..=12 {
        let a = ef_coefficients(k).unwrap();
        for s in 0..=k {
            assert_eq!(a[s], a[k - s], "k={k} s={s}");
        }
    }
}

#[test]
fn q_polynomial_expansion_is_euler_frobenius() {
    // Q_k(x) = Σ_i Δ^i0^{k+1} (x-1)^{k+1-i}, expanded in powers of x.
    for k in 0..=8 {
        let mut q = vec![0i128; k + 2];
        for i in 0..=k + 1 {
            let d = delta_zero(i, k + 1).unwrap();
            let p = k + 1 - i;
            for s in 0..=p {
                let sign = if (p - s) % 2 == 0 { 1 } else { -1 };
                q[s] += d * sign * binom(p, s);
            }
        }
        assert_eq!(q[k + 1], 0, "k={k}: Q_k has degree k");
        assert_eq!(&q[..=k], &ef_coefficients(k).unwrap()[..], "k={k}");
    }
}

#[test]
fn reciprocal_root_products() {
    for k in (2..=10).step_by(2) {
        let p = EfPolynomial::new(k).unwrap();
        let scale = p.coeffs.iter().map(|c| c.abs() as f64).fold(0.0, f64::max);
        let mut prod = 1.0;
        for &q in &p.roots_inside {
            // The partner root is found independently by bisection on the
            // sign change of E_k in (-∞, -1).
            let (mut lo, mut hi) = (1.0 / q * 1.01, 1.0 / q * 0.99);
            assert!(p.eval(lo).signum() != p.eval(hi).signum(), "k={k} q={q}");
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if p.eval(mid).signum() == p.eval(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            prod *= q * 0.5 * (lo + hi);
            assert!(p.eval(q).abs() <= 1e-10 * scale);
        }
        assert!((prod - 1.0).abs() <= 1e-10, "k={k}: {prod}");
    }
}

#[test]
fn roots_real_negative_distinct() {
    for k in 1..=12 {
        let r = EfPolynomial::new(k).unwrap().all_roots();
        assert_eq!(r.len(), k);
        assert!(r.iter().all(|&q| q < 0.0));
        assert!(r.windows(2).all(|w| w[1] - w[0] > 1e-6));
    }
}

#[test]
fn omega_to_zero_is_monotone() {
    for m in 1..=3 {
        let zero = coefficients(&QuadratureSpec::new(m, 0.0, 0.0, 1.0, 16).unwrap()).unwrap();
        let mut last = f64::INFINITY;
        for w in [1e-2, 1e-4, 1e-6] {
            let cv = coefficients(&QuadratureSpec::new(m, w, 0.0, 1.0, 16).unwrap()).unwrap();
            let d = max_diff(&cv.values, &zero.values);
            assert!(d < last, "m={m} w={w}: {d} vs {last}");
            last = d;
        }
        assert!(last < 1e-5);
    }
}

#[test]
fn resonance_lipschitz_bound() {
    let n = 16;
    for m in 1..=3 {
        let at = |wh: f64| {
            coefficients(&QuadratureSpec::new(m, wh * n as f64, 0.0, 1.0, n).unwrap())
                .unwrap()
                .values
        };
        let centre = at(1.0);
        for eps in [1e-4, 1e-5, 1e-6] {
            for wh in [1.0 - eps, 1.0 + eps] {
                let d = max_diff(&at(wh), &centre);
                assert!(d <= 10.0 * eps * n as f64, "m={m} eps={eps}: {d}");
            }
        }
    }
}

#[test]
fn discrete_operator_even_and_decaying() {
    for m in 1..=3 {
        let op = DiscreteOperator::new(m, 0.1).unwrap();
        for beta in 0..40 {
            assert_eq!(op.d_discrete(beta), op.d_discrete(-beta));
        }
        if m > 1 {
            let q = op.roots.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            let d10 = op.d_discrete(10).abs();
            let d30 = op.d_discrete(30).abs();
            // Geometric decay at rate q, up to a polynomial prefactor.
            assert!(d30 <= d10 * q.powi(20) * 100.0, "m={m}");
        }
    }
}

#[test]
fn convolution_residual_shrinks_with_window() {
    let op = DiscreteOperator::new(3, 0.05).unwrap();
    let knee = op.default_window();
    let mut last = f64::INFINITY;
    for w in [knee, 2 * knee, 4 * knee] {
        let r = op.verify_convolution(w).max_residual;
        assert!(r <= last);
        last = r;
    }
}

#[test]
fn centred_disk_sinogram_is_even() {
    let disk = EllipsePhantom::unit_disk();
    let s = make_sinogram(&disk, 6, 33).unwrap();
    for k in 0..6 {
        let row = s.row(k);
        for j in 0..33 {
            assert!((row[j] - row[32 - j]).abs() < 1e-14);
            let t = s.detector(j);
            let chord = 2.0 * (1.0 - t * t).max(0.0).sqrt();
            assert!((row[j] - chord).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ef_reflection_identity(k in 1usize..=12, x in 0.1f64..0.9) {
        let p = EfPolynomial::new(k).unwrap();
        let lhs = p.eval(x);
        let rhs = x.powi(k as i32) * p.eval(1.0 / x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs());
    }

    #[test]
    fn conjugation_symmetry(
        m in 1usize..=3,
        n in 3usize..40,
        omega in -60.0f64..60.0,
        a in -2.0f64..2.0,
        len in 0.5f64..3.0,
    ) {
        let pos = coefficients(&QuadratureSpec::new(m, omega, a, a + len, n).unwrap()).unwrap();
        let neg = coefficients(&QuadratureSpec::new(m, -omega, a, a + len, n).unwrap()).unwrap();
        let conj: Vec<Complex64> = pos.values.iter().map(|c| c.conj()).collect();
        prop_assert!(max_diff(&neg.values, &conj) <= 1e-12);
    }

    #[test]
    fn zero_frequency_symmetry(m in 1usize..=3, n in 3usize..60, a in -2.0f64..2.0, len in 0.5f64..3.0) {
        let cv = coefficients(&QuadratureSpec::new(m, 0.0, a, a + len, n).unwrap()).unwrap();
        prop_assert_eq!(cv.branch, Branch::ZeroOmega);
        for beta in 0..=n {
            prop_assert_eq!(cv.values[beta], cv.values[n - beta]);
        }
    }

    #[test]
    fn exact_on_low_degree_monomials(
        m in 1usize..=3,
        n in 3usize..40,
        omega in -40.0f64..40.0,
        a in -2.0f64..2.0,
        len in 0.5f64..3.0,
    ) {
        let spec = QuadratureSpec::new(m, omega, a, a + len, n).unwrap();
        let cv = coefficients(&spec).unwrap();
        prop_assert_eq!(cv.values.len(), n + 1);
        for alpha in 0..m {
            let sum: Complex64 = (0..=n)
                .map(|beta| cv.values[beta] * spec.node(beta).powi(alpha as i32))
                .sum();
            let exact = moment(alpha, omega, a, a + len);
            prop_assert!(
                (sum - exact).norm() <= 1e-9 * (1.0 + exact.norm()),
                "alpha={} sum={} exact={}", alpha, sum, exact
            );
        }
    }

    #[test]
    fn interval_transform_matches_direct(
        m in 1usize..=3,
        n in 3usize..40,
        omega in -20.0f64..20.0,
        a in -2.0f64..2.0,
        len in 0.5f64..3.0,
    ) {
        let b = a + len;
        let direct = coefficients(&QuadratureSpec::new(m, omega, a, b, n).unwrap()).unwrap();
        let unit = coefficients(&QuadratureSpec::new(m, omega * len, 0.0, 1.0, n).unwrap()).unwrap();
        let mapped = transform_unit_to_ab(&unit, a, b, omega).unwrap();
        let scale = direct.values.iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(max_diff(&direct.values, &mapped.values) <= 1e-10 * scale);
    }

    #[test]
    fn k_factor_matches_definition(m in 1usize..=3, wh in 0.01f64..0.99) {
        // (sin πωh / πωh)^{2m} (2m-1)! / (2 Σ_{α<m-1} a_α cos[2πωh(m-1-α)] + a_{m-1}).
        let a = ef_coefficients(2 * m - 2).unwrap();
        let mut den = a[m - 1] as f64;
        for (al, &c) in a.iter().enumerate().take(m - 1) {
            den += 2.0 * c as f64 * (2.0 * PI * wh * (m - 1 - al) as f64).cos();
        }
        let sinc = (PI * wh).sin() / (PI * wh);
        let fact: f64 = (1..2 * m).map(|i| i as f64).product();
        let expected = sinc.powi(2 * m as i32) * fact / den;
        let got = k_factor(m, wh / 0.1, 0.1).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn g_kernel_is_even(m in 1usize..=4, x in -3.0f64..3.0) {
        prop_assert_eq!(g_kernel(m, x), g_kernel(m, -x));
    }

    #[test]
    fn radon_additive_over_ellipses(theta in 0.0f64..PI, t in -1.2f64..1.2, split in 1usize..9) {
        let full = EllipsePhantom::shepp_logan();
        let (first, second) = full.ellipses.split_at(split);
        let part = |e: &[Ellipse]| analytic_radon(&EllipsePhantom { ellipses: e.to_vec() }, theta, t);
        let sum = part(first) + part(second);
        prop_assert!((analytic_radon(&full, theta, t) - sum).abs() <= 1e-12);
    }

    #[test]
    fn forward_transform_is_linear(
        x in prop::collection::vec(-1.0f64..1.0, 17),
        y in prop::collection::vec(-1.0f64..1.0, 17),
        s in -3.0f64..3.0,
        m in 1usize..=3,
    ) {
        let grid = FrequencyGrid::new(8.0, 16).unwrap();
        let fx = forward_transform(&SampledSignal::from_real(-1.0, 1.0, &x).unwrap(), &grid, m).unwrap();
        let fy = forward_transform(&SampledSignal::from_real(-1.0, 1.0, &y).unwrap(), &grid, m).unwrap();
        let z: Vec<f64> = x.iter().zip(&y).map(|(p, q)| s * p + q).collect();
        let fz = forward_transform(&SampledSignal::from_real(-1.0, 1.0, &z).unwrap(), &grid, m).unwrap();
        for k in 0..fz.values.len() {
            prop_assert!((fz.values[k] - (fx.values[k] * s + fy.values[k])).norm() <= 1e-12);
        }
    }

    #[test]
    fn psnr_self_consistent(seed in prop::collection::vec(-1.0f64..1.0, 256), bump in 0.01f64..0.5) {
        let reference = ImageGrid { n: 16, data: seed.clone() };
        let mut image = reference.clone();
        image.data[37] += bump;
        let r = metrics(&image, &reference).unwrap();
        let i_max = image.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((r.psnr - 10.0 * (i_max * i_max / r.mse).log10()).abs() <= 1e-12 * r.psnr.abs().max(1.0));
        prop_assert!((r.e_max - bump).abs() <= 1e-15);
    }
}
