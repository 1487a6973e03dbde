//! Reconstruction settings: command-line flags, optionally overridden key by
//! key from a TOML file, validated before any computation starts.
//!
//! Recognised keys (all optional):
//!
//! | key            | type            | meaning                                   |
//! |----------------|-----------------|-------------------------------------------|
//! | `image_size`   | integer ≥ 16    | output grid is `n × n`                    |
//! | `views`        | integer ≥ 1     | projection angles over `[0, π)`           |
//! | `detectors`    | integer ≥ 8     | detector samples on `[-1, 1]`             |
//! | `methods`      | array of string | any of `"dft"`, `"m1"` .. `"m3"`          |
//! | `oversampling` | integer ≥ 1     | frequency nodes per detector interval     |
//! | `noise`        | float in (0, 1] | Poisson noise level                       |
//! | `seed`         | integer         | noise seed                                |
//! | `threads`      | integer ≥ 1     | worker threads                            |
//! | `out_dir`      | string          | output directory                          |
//! | `png`          | bool            | also write PNG images                     |
//! | `window`       | `[lo, hi]`      | fixed grey-level window                   |
//! | `fov_mask`     | bool            | metrics over the unit disk only           |
//! | `phantom`      | string          | ellipse table (TOML), default Shepp-Logan |
//! | `timing`       | bool            | record `runtime_ms` in the metrics        |
//!
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use oqf_core::ct::{Ellipse, EllipsePhantom, FbpMethod};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub image_size: Option<usize>,
    pub views: Option<usize>,
    pub detectors: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub oversampling: Option<usize>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub png: Option<bool>,
    pub window: Option<[f64; 2]>,
    pub fov_mask: Option<bool>,
    pub phantom: Option<PathBuf>,
    pub timing: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }
}

/// Fully resolved reconstruction run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub image_size: usize,
    pub views: usize,
    pub detectors: usize,
    pub methods: Vec<FbpMethod>,
    pub oversampling: usize,
    pub noise: Option<f64>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    pub png: bool,
    pub window: Option<[f64; 2]>,
    pub fov_mask: bool,
    pub phantom: Option<PathBuf>,
    pub timing: bool,
}

impl Default for RunConfig {
    /// Desk-scale run: 128×128, 180 views, 128 detectors, all three methods.
    fn default() -> Self {
        RunConfig {
            image_size: 128,
            views: 180,
            detectors: 128,
            methods: vec![
                FbpMethod::DftBaseline,
                FbpMethod::Optimal { m: 2 },
                FbpMethod::Optimal { m: 3 },
            ],
            oversampling: 4,
            noise: None,
            seed: 0,
            threads: None,
            out_dir: PathBuf::from("."),
            png: false,
            window: None,
            fov_mask: false,
            phantom: None,
            timing: true,
        }
    }
}

pub fn parse_method(s: &str) -> CliResult<FbpMethod> {
    match s {
        "dft" => Ok(FbpMethod::DftBaseline),
        _ => match s.strip_prefix('m').and_then(|d| d.parse::<usize>().ok()) {
            Some(m) if (1..=3).contains(&m) => Ok(FbpMethod::Optimal { m }),
            _ => Err(CliError::Validation(format!(
                "unknown method {s:?}; expected dft, m1, m2 or m3"
            ))),
        },
    }
}

pub fn method_label(m: FbpMethod) -> String {
    match m {
        FbpMethod::DftBaseline => "dft".into(),
        FbpMethod::Optimal { m } => format!("m{m}"),
    }
}

impl RunConfig {
    /// Applies every key present in `file` on top of `self`.
    pub fn apply(&mut self, file: &ConfigFile) -> CliResult<()> {
        macro_rules! take {
            ($($k:ident),*) => {$(
                if let Some(v) = &file.$k {
                    self.$k = v.clone();
                }
            )*};
        }
        take!(
            image_size,
            views,
            detectors,
            oversampling,
            seed,
            out_dir,
            png,
            fov_mask,
            timing
        );
        if let Some(m) = &file.methods {
            self.methods = m
                .iter()
                .map(|s| parse_method(s))
                .collect::<CliResult<_>>()?;
        }
        if file.noise.is_some() {
            self.noise = file.noise;
        }
        if file.threads.is_some() {
            self.threads = file.threads;
        }
        if file.window.is_some() {
            self.window = file.window;
        }
        if file.phantom.is_some() {
            self.phantom = file.phantom.clone();
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: String| Err(CliError::Validation(msg));
        if self.image_size < 16 {
            return fail(format!(
                "image_size must be at least 16, got {}",
                self.image_size
            ));
        }
        if self.views == 0 {
            return fail("views must be at least 1".into());
        }
        if self.detectors < 8 {
            return fail(format!(
                "detectors must be at least 8, got {}",
                self.detectors
            ));
        }
        if self.methods.is_empty() {
            return fail("at least one method is required".into());
        }
        if self.oversampling == 0 {
            return fail("oversampling must be at least 1".into());
        }
        if let Some(l) = self.noise {
            if !(l > 0.0 && l <= 1.0) {
                return fail(format!("noise level must lie in (0, 1], got {l}"));
            }
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1".into());
        }
        if let Some([lo, hi]) = self.window {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return fail(format!("window needs lo < hi, got [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipseRow {
    x0: f64,
    y0: f64,
    a: f64,
    b: f64,
    rotation_deg: f64,
    intensity: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhantomFile {
    ellipse: Vec<EllipseRow>,
}

/// Ellipse table in the format of `data/shepp_logan.toml`.
pub fn parse_phantom(text: &str) -> CliResult<EllipsePhantom> {
    let file: PhantomFile =
        toml::from_str(text).map_err(|e| CliError::Validation(format!("phantom: {e}")))?;
    let mut ellipses = Vec::with_capacity(file.ellipse.len());
    for (i, r) in file.ellipse.iter().enumerate() {
        let ok = [r.x0, r.y0, r.a, r.b, r.rotation_deg, r.intensity]
            .iter()
            .all(|v| v.is_finite())
            && r.a > 0.0
            && r.b > 0.0;
        if !ok {
            return Err(CliError::Validation(format!(
                "phantom ellipse {i}: needs finite values and positive semi-axes"
            )));
        }
        ellipses.push(Ellipse {
            x0: r.x0,
            y0: r.y0,
            semi_x: r.a,
            semi_y: r.b,
            angle_deg: r.rotation_deg,
            intensity: r.intensity,
        });
    }
    Ok(EllipsePhantom { ellipses })
}

pub fn load_phantom(path: Option<&Path>) -> CliResult<EllipsePhantom> {
    match path {
        None => Ok(EllipsePhantom::shepp_logan()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_phantom(&text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            ConfigFile::parse("image_size = 64\ncolour = true\n"),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn file_overrides_flags() {
        let mut cfg = RunConfig {
            image_size: 256,
            ..RunConfig::default()
        };
        let file = ConfigFile::parse("image_size = 64\nmethods = [\"m2\"]\nnoise = 0.1\n").unwrap();
        cfg.apply(&file).unwrap();
        assert_eq!(cfg.image_size, 64);
        assert_eq!(cfg.methods, vec![FbpMethod::Optimal { m: 2 }]);
        assert_eq!(cfg.noise, Some(0.1));
        assert_eq!(cfg.views, 180);
        cfg.validate().unwrap();
    }

    #[test]
    fn validation_catches_bad_values() {
        for bad in [
            RunConfig {
                image_size: 8,
                ..RunConfig::default()
            },
            RunConfig {
                noise: Some(1.5),
                ..RunConfig::default()
            },
            RunConfig {
                window: Some([1.0, 1.0]),
                ..RunConfig::default()
            },
            RunConfig {
                methods: vec![],
                ..RunConfig::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn method_names() {
        assert_eq!(parse_method("dft").unwrap(), FbpMethod::DftBaseline);
        assert_eq!(parse_method("m3").unwrap(), FbpMethod::Optimal { m: 3 });
        assert!(parse_method("m4").is_err());
        assert!(parse_method("fft").is_err());
    }
}
