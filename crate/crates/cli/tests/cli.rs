//! End-to-end checks of the `oqf` binary and the file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;

use oqf_cli::config::parse_phantom;
use oqf_cli::sino_io::{decode_bin, decode_csv, encode_bin, encode_csv};
use oqf_core::ct::{Sinogram, SHEPP_LOGAN};

fn oqf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oqf"))
        .args(args)
        .env_remove("OQF_OUT_DIR")
        .output()
        .expect("spawn oqf")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("oqf-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

const SMALL_RUN: [&str; 9] = [
    "reconstruct",
    "--size",
    "32",
    "--views",
    "12",
    "--detectors",
    "32",
    "--methods",
    "dft,m2",
];

#[test]
fn too_few_nodes_is_a_validation_error() {
    let out = oqf(&["coeffs", "--m", "3", "--omega", "1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(oqf(&["coeffs", "--bogus"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let out = oqf(&[
        "sinogram",
        "--views",
        "2",
        "--detectors",
        "8",
        "-o",
        "/nonexistent/dir/s.bin",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn coeffs_json_has_all_weights() {
    let v = json(&oqf(&[
        "coeffs", "--m", "2", "--omega", "-2.7", "--a", "-1", "--b", "2", "--n", "12",
    ]));
    let c = v["coefficients"].as_array().unwrap();
    assert_eq!(c.len(), 13);
    assert_eq!(v["branch"], "generic");
    // Sum of weights is ∫ e^{2πiωx} dx over [-1, 2].
    let (re, im) = c.iter().fold((0.0, 0.0), |(r, i), e| {
        (r + e["re"].as_f64().unwrap(), i + e["im"].as_f64().unwrap())
    });
    let w = -2.7 * 2.0 * std::f64::consts::PI;
    let exact_re = ((w * 2.0).sin() - (-w).sin()) / w;
    let exact_im = (-(w * 2.0).cos() + (-w).cos()) / w;
    assert!((re - exact_re).abs() < 1e-12 && (im - exact_im).abs() < 1e-12);
}

#[test]
fn oracle_reports_conditioning() {
    let v = json(&oqf(&["oracle", "--m", "3", "--omega", "2.7", "--n", "16"]));
    assert_eq!(v["provenance"], "oracle");
    assert!(v["condition_number"].as_f64().unwrap() > 1.0);
    assert!(v["residual"].as_f64().unwrap() <= 1e-10);
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical_without_timing() {
    let (d1, d2) = (scratch("rerun1"), scratch("rerun2"));
    for d in [&d1, &d2] {
        let mut args = SMALL_RUN.to_vec();
        args.extend([
            "--noise",
            "0.1",
            "--seed",
            "5",
            "--no-timing",
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        json(&oqf(&args));
    }
    let (f1, f2) = (read_dir_sorted(&d1), read_dir_sorted(&d2));
    let names: Vec<_> = f1.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        [
            "metrics.json",
            "phantom.pgm",
            "recon_dft.pgm",
            "recon_m2.pgm"
        ]
    );
    assert_eq!(f1, f2);
    let metrics: serde_json::Value = serde_json::from_slice(&f1[0].1).unwrap();
    assert!(metrics["reports"][0]["runtime_ms"].is_null());
}

#[test]
fn out_dir_from_environment() {
    let dir = scratch("envdir");
    let out = Command::new(env!("CARGO_BIN_EXE_oqf"))
        .args(SMALL_RUN)
        .args(["--methods", "m1", "--png"])
        .env("OQF_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("metrics.json").is_file());
    let png = std::fs::read(dir.join("recon_m1.png")).unwrap();
    assert_eq!(&png[..8], b"\x89PNG\r\n\x1a\n");
    let pgm = std::fs::read(dir.join("recon_m1.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n32 32\n65535\n"));
    assert_eq!(pgm.len(), b"P5\n32 32\n65535\n".len() + 32 * 32 * 2);
}

#[test]
fn config_file_overrides_flags() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "methods = [\"m3\"]\ntiming = false\n").unwrap();
    let mut args = SMALL_RUN.to_vec();
    args.extend([
        "--out-dir",
        dir.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    json(&oqf(&args));
    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("metrics.json")).unwrap()).unwrap();
    let reports = m["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["method"], "oqf");
    assert_eq!(reports[0]["m"], 3);

    std::fs::write(&cfg, "colour = 1\n").unwrap();
    let mut args = SMALL_RUN.to_vec();
    args.extend(["--config", cfg.to_str().unwrap()]);
    assert_eq!(oqf(&args).status.code(), Some(2));
}

#[test]
fn saved_sinogram_reconstructs_like_the_phantom() {
    let dir = scratch("sino");
    let file = dir.join("s.bin");
    json(&oqf(&[
        "sinogram",
        "--views",
        "12",
        "--detectors",
        "32",
        "-o",
        file.to_str().unwrap(),
    ]));
    let (a, b) = (dir.join("a"), dir.join("b"));
    let mut direct = SMALL_RUN.to_vec();
    direct.extend(["--no-timing", "--out-dir", a.to_str().unwrap()]);
    json(&oqf(&direct));
    let mut from_file = SMALL_RUN.to_vec();
    from_file.extend([
        "--no-timing",
        "--out-dir",
        b.to_str().unwrap(),
        "--sinogram",
        file.to_str().unwrap(),
    ]);
    json(&oqf(&from_file));
    for name in ["recon_dft.pgm", "recon_m2.pgm", "metrics.json"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn shipped_phantom_table_matches_builtin() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/shepp_logan.toml"
    ))
    .unwrap();
    let p = parse_phantom(&text).unwrap();
    assert_eq!(p.ellipses.len(), SHEPP_LOGAN.len());
    for (e, row) in p.ellipses.iter().zip(SHEPP_LOGAN.iter()) {
        assert_eq!(
            [e.x0, e.y0, e.semi_x, e.semi_y, e.angle_deg, e.intensity],
            *row
        );
    }
}

fn sinogram() -> impl Strategy<Value = Sinogram> {
    (1usize..5, 2usize..9).prop_flat_map(|(a, d)| {
        prop::collection::vec(-1e3f64..1e3, a * d)
            .prop_map(move |v| Sinogram::new(a, d, v).unwrap())
    })
}

proptest! {
    #[test]
    fn binary_round_trip_is_exact(s in sinogram()) {
        let back = decode_bin(&encode_bin(&s)).unwrap();
        prop_assert_eq!(back.n_angles, s.n_angles);
        prop_assert_eq!(back.n_detectors, s.n_detectors);
        prop_assert!(back.values.iter().zip(&s.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn csv_round_trip_keeps_twelve_digits(s in sinogram()) {
        let back = decode_csv(&encode_csv(&s)).unwrap();
        prop_assert_eq!(back.n_angles, s.n_angles);
        prop_assert_eq!(back.n_detectors, s.n_detectors);
        for (x, y) in back.values.iter().zip(&s.values) {
            prop_assert!((x - y).abs() <= 1e-11 * y.abs().max(1e-300));
        }
    }
}
