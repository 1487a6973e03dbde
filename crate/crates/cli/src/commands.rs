//! Subcommands of the `oqf` binary. Each returns the text for stdout; the
//! reconstruction commands also write files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use oqf_core::ct::{make_sinogram, metrics_masked, FbpConfig, ImageGrid, Reconstructor, Sinogram};
use oqf_core::discrete_op::DiscreteOperator;
use oqf_core::efpoly::EfPolynomial;
use oqf_core::oracle::solve_oracle_ab;
use oqf_core::quadrature::{coefficients, QuadratureSpec};

use crate::config::{load_phantom, method_label, parse_method, ConfigFile, RunConfig};
use crate::convergence::{self, Integrand};
use crate::imageio::{self, Window};
use crate::noise::add_poisson_noise;
use crate::report::{float, to_json, CoefficientReport, MetricsEntry};
use crate::sino_io::{self, SinoFormat};
use crate::{parallel, CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "OQF_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "oqf",
    version,
    about = "Optimal quadrature for Fourier integrals and CT reconstruction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form weights for ∫ₐᵇ e^{2πiωx} φ(x) dx.
    Coeffs(CoeffsArgs),
    /// Weights from a direct solve of the defining linear system.
    Oracle(OracleArgs),
    /// Residuals of the discrete operator D_m.
    Verify(VerifyArgs),
    /// Euler-Frobenius polynomial coefficients and roots.
    Efpoly(EfpolyArgs),
    /// Error against N and fitted convergence order.
    Convergence(ConvergenceArgs),
    /// Analytic phantom sinogram, optionally with Poisson noise.
    Sinogram(SinogramArgs),
    /// Filtered back-projection with quality metrics.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Smoothness order of the Sobolev space.
    #[arg(long)]
    pub m: usize,
    /// Frequency in cycles per unit length.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Number of subintervals.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Number of subintervals (at most 64).
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Grid step.
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    /// Truncation window; defaults to the decay-based choice.
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EfpolyArgs {
    /// Degree.
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub m: usize,
    /// One of exp, cos, cubic.
    #[arg(long, default_value = "exp")]
    pub integrand: String,
    #[arg(long, default_value_t = 3.3, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Comma-separated N ladder.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512")]
    pub n: Vec<usize>,
    /// Emit JSON instead of a text table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SinogramArgs {
    #[arg(long, default_value_t = 180)]
    pub views: usize,
    #[arg(long, default_value_t = 128)]
    pub detectors: usize,
    /// Ellipse table in TOML; the built-in Shepp-Logan phantom otherwise.
    #[arg(long)]
    pub phantom: Option<PathBuf>,
    /// Poisson noise level in (0, 1].
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; `.csv` selects CSV, anything else the binary format.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// 512×512 image, 360 views, 512 detectors.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub views: Option<usize>,
    #[arg(long)]
    pub detectors: Option<usize>,
    /// Comma-separated subset of dft, m1, m2, m3.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Frequency nodes per detector interval.
    #[arg(long)]
    pub oversampling: Option<usize>,
    /// Poisson noise level in (0, 1].
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    /// Also write PNG images.
    #[arg(long)]
    pub png: bool,
    /// Grey-level window `lo,hi` for image output.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    /// Compute metrics over the unit disk only.
    #[arg(long)]
    pub fov_mask: bool,
    #[arg(long)]
    pub phantom: Option<PathBuf>,
    /// Reconstruct this sinogram file instead of the phantom's.
    #[arg(long)]
    pub sinogram: Option<PathBuf>,
    /// Report `runtime_ms` as null so reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// TOML file whose keys override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Coeffs(a) => cmd_coeffs(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Efpoly(a) => cmd_efpoly(&a),
        Command::Convergence(a) => cmd_convergence(&a),
        Command::Sinogram(a) => cmd_sinogram(&a),
        Command::Reconstruct(a) => {
            let (cfg, sino) = resolve_reconstruct(&a)?;
            let outcome = reconstruct(&cfg, sino)?;
            write_outputs(&cfg, &outcome)?;
            Ok(to_json(&outcome.summary))
        }
    }
}

fn render(report: &CoefficientReport, format: TableFormat) -> String {
    match format {
        TableFormat::Json => to_json(report),
        TableFormat::Csv => report.to_csv(),
    }
}

pub fn cmd_coeffs(a: &CoeffsArgs) -> CliResult<String> {
    let spec = QuadratureSpec::new(a.m, a.omega, a.a, a.b, a.n)?;
    let cv = coefficients(&spec)?;
    Ok(render(&CoefficientReport::new(&cv), a.format))
}

pub fn cmd_oracle(a: &OracleArgs) -> CliResult<String> {
    let sol = solve_oracle_ab(a.m, a.omega, a.a, a.b, a.n)?;
    let mut report = CoefficientReport::new(&sol.coefficients);
    report.condition_number = Some(sol.condition_number);
    report.residual = Some(sol.residual);
    Ok(render(&report, a.format))
}

#[derive(Debug, Serialize)]
struct MomentCheck {
    k: usize,
    value: f64,
    expected: Option<f64>,
    #[serde(serialize_with = "float")]
    error: f64,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    m: usize,
    h: f64,
    window: usize,
    default_window: usize,
    window_sufficient: bool,
    convolution_residual: f64,
    worst_beta: i64,
    moments: Vec<MomentCheck>,
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<String> {
    let op = DiscreteOperator::new(a.m, a.h)?;
    let default_window = op.default_window();
    let window = a.window.unwrap_or(default_window);
    if window == 0 {
        return Err(CliError::Validation("window must be positive".into()));
    }
    let conv = op.verify_convolution(window);
    let moments = (0..=2 * a.m)
        .map(|k| {
            let value = op.verify_moments(k, window);
            let expected = op.expected_moment(k);
            let error = match expected {
                Some(e) if e != 0.0 => (value - e).abs() / e.abs(),
                Some(_) => value.abs(),
                None => f64::NAN,
            };
            MomentCheck {
                k,
                value,
                expected,
                error,
            }
        })
        .collect();
    Ok(to_json(&VerifyReport {
        m: a.m,
        h: a.h,
        window,
        default_window,
        window_sufficient: conv.window_sufficient,
        convolution_residual: conv.max_residual,
        worst_beta: conv.worst_beta,
        moments,
    }))
}

#[derive(Debug, Serialize)]
struct EfpolyReport {
    k: usize,
    coefficients: Vec<i128>,
    roots: Vec<f64>,
    roots_inside: Vec<f64>,
}

pub fn cmd_efpoly(a: &EfpolyArgs) -> CliResult<String> {
    let p = EfPolynomial::new(a.k)?;
    Ok(to_json(&EfpolyReport {
        k: a.k,
        coefficients: p.coeffs.clone(),
        roots: p.all_roots(),
        roots_inside: p.roots_inside.clone(),
    }))
}

pub fn cmd_convergence(a: &ConvergenceArgs) -> CliResult<String> {
    let integrand: Integrand = a.integrand.parse()?;
    let study = convergence::run(a.m, integrand, a.omega, a.a, a.b, &a.n)?;
    if a.json {
        return Ok(to_json(&study));
    }
    let mut out = format!(
        "m={} integrand={} omega={} interval=[{}, {}]\n{:>8} {:>14} {:>14}\n",
        study.m, a.integrand, study.omega, study.a, study.b, "N", "h", "error"
    );
    for r in &study.rows {
        out.push_str(&format!("{:>8} {:>14.6e} {:>14.6e}\n", r.n, r.h, r.error));
    }
    out.push_str(&format!("fitted order {:.4}\n", study.order));
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SinogramSummary {
    output: String,
    views: usize,
    detectors: usize,
    noise_level: Option<f64>,
    noise_seed: Option<u64>,
    clamped: Option<usize>,
}

pub fn cmd_sinogram(a: &SinogramArgs) -> CliResult<String> {
    if a.views == 0 || a.detectors < 2 {
        return Err(CliError::Validation(
            "need at least one view and two detectors".into(),
        ));
    }
    let phantom = load_phantom(a.phantom.as_deref())?;
    let mut sino = make_sinogram(&phantom, a.views, a.detectors)?;
    let mut clamped = None;
    if let Some(level) = a.noise {
        let (noisy, rep) = add_poisson_noise(&sino, level, a.seed)?;
        sino = noisy;
        clamped = Some(rep.clamped);
    }
    sino_io::write(&a.output, &sino, SinoFormat::from_path(&a.output))?;
    Ok(to_json(&SinogramSummary {
        output: a.output.display().to_string(),
        views: a.views,
        detectors: a.detectors,
        noise_level: a.noise,
        noise_seed: a.noise.map(|_| a.seed),
        clamped,
    }))
}

/// Flags first, then the config file on top, then validation.
pub fn resolve_reconstruct(a: &ReconstructArgs) -> CliResult<(RunConfig, Option<Sinogram>)> {
    let mut cfg = RunConfig::default();
    if a.full_scale {
        cfg.image_size = 512;
        cfg.views = 360;
        cfg.detectors = 512;
    }
    if let Some(n) = a.size {
        cfg.image_size = n;
        if a.detectors.is_none() {
            cfg.detectors = n;
        }
    }
    if let Some(v) = a.views {
        cfg.views = v;
    }
    if let Some(d) = a.detectors {
        cfg.detectors = d;
    }
    if let Some(ms) = &a.methods {
        cfg.methods = ms
            .iter()
            .map(|s| parse_method(s))
            .collect::<CliResult<_>>()?;
    }
    if let Some(o) = a.oversampling {
        cfg.oversampling = o;
    }
    cfg.noise = a.noise;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.threads = a.threads;
    if let Some(d) = &a.out_dir {
        cfg.out_dir = d.clone();
    }
    cfg.png = a.png;
    if let Some(w) = &a.window {
        cfg.window = Some([w[0], w[1]]);
    }
    cfg.fov_mask = a.fov_mask;
    cfg.phantom = a.phantom.clone();
    cfg.timing = !a.no_timing;
    if let Some(path) = &a.config {
        cfg.apply(&ConfigFile::load(path)?)?;
    }
    let sino = match &a.sinogram {
        Some(path) => {
            let s = sino_io::read(path)?;
            cfg.views = s.n_angles;
            cfg.detectors = s.n_detectors;
            Some(s)
        }
        None => None,
    };
    cfg.validate()?;
    Ok((cfg, sino))
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub method: String,
    /// Largest `|Im Q| / max|Re Q|` on the sampled filtered projections.
    pub max_imag_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub image_size: usize,
    pub views: usize,
    pub detectors: usize,
    pub oversampling: usize,
    pub noise_level: Option<f64>,
    pub noise_seed: Option<u64>,
    pub clamped: Option<usize>,
    pub fov_mask: bool,
    pub reports: Vec<MetricsEntry>,
    pub diagnostics: Vec<Diagnostics>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub reference: ImageGrid,
    /// `(label, image)` per method, in the configured order.
    pub images: Vec<(String, ImageGrid)>,
}

/// Runs every configured method on one sinogram (the phantom's, unless
/// given) and scores it against the rasterised phantom.
pub fn reconstruct(cfg: &RunConfig, sinogram: Option<Sinogram>) -> CliResult<RunOutcome> {
    cfg.validate()?;
    let phantom = load_phantom(cfg.phantom.as_deref())?;
    let mut sino = match sinogram {
        Some(s) => s,
        None => make_sinogram(&phantom, cfg.views, cfg.detectors)?,
    };
    let mut clamped = None;
    if let Some(level) = cfg.noise {
        let (noisy, rep) = add_poisson_noise(&sino, level, cfg.seed)?;
        sino = noisy;
        clamped = Some(rep.clamped);
    }
    let reference = phantom.rasterize(cfg.image_size);
    let mut reports = Vec::new();
    let mut diagnostics = Vec::new();
    let mut images = Vec::new();
    for &method in &cfg.methods {
        let start = Instant::now();
        let rec = Reconstructor::new(
            &sino,
            FbpConfig {
                image_size: cfg.image_size,
                method,
                oversampling: cfg.oversampling,
            },
        )?;
        let (image, imag) = parallel::reconstruct(&rec, cfg.threads)?;
        let elapsed = start.elapsed().as_millis() as u64;
        let mt = metrics_masked(&image, &reference, cfg.fov_mask)?;
        let label = method_label(method);
        reports.push(MetricsEntry {
            method: method.name().into(),
            m: method.order(),
            noise_seed: cfg.noise.map(|_| cfg.seed),
            e_max: mt.e_max,
            mse: mt.mse,
            psnr: mt.psnr,
            runtime_ms: cfg.timing.then_some(elapsed),
        });
        diagnostics.push(Diagnostics {
            method: label.clone(),
            max_imag_ratio: imag,
        });
        images.push((label, image));
    }
    Ok(RunOutcome {
        summary: RunSummary {
            image_size: cfg.image_size,
            views: sino.n_angles,
            detectors: sino.n_detectors,
            oversampling: cfg.oversampling,
            noise_level: cfg.noise,
            noise_seed: cfg.noise.map(|_| cfg.seed),
            clamped,
            fov_mask: cfg.fov_mask,
            reports,
            diagnostics,
        },
        reference,
        images,
    })
}

fn write_image(cfg: &RunConfig, dir: &Path, stem: &str, image: &ImageGrid) -> CliResult<()> {
    let window = match cfg.window {
        Some([lo, hi]) => Window { lo, hi },
        None => Window::of(image),
    };
    imageio::write_pgm(&dir.join(format!("{stem}.pgm")), image, window)?;
    if cfg.png {
        imageio::write_png(&dir.join(format!("{stem}.png")), image, window)?;
    }
    Ok(())
}

/// Writes `phantom.pgm`, `recon_<method>.pgm` (and PNGs on request) and
/// `metrics.json` into the output directory.
pub fn write_outputs(cfg: &RunConfig, outcome: &RunOutcome) -> CliResult<()> {
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_image(cfg, dir, "phantom", &outcome.reference)?;
    for (label, image) in &outcome.images {
        write_image(cfg, dir, &format!("recon_{label}"), image)?;
    }
    let path = dir.join("metrics.json");
    std::fs::write(&path, to_json(&outcome.summary)).map_err(|e| CliError::io(&path, e))
}
