//! JSON and CSV report records.
//!
//! JSON numbers are written with the shortest representation that round-trips
//! the `f64`, so no precision is lost. Non-finite values, which JSON cannot
//! express, become the strings `"inf"`, `"-inf"` and `"nan"`.

use serde::{Serialize, Serializer};

use oqf_core::quadrature::CoefficientVector;
use oqf_core::Complex64;

/// Serializes an `f64`, mapping non-finite values to strings.
pub fn float<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn float_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => float(x, s),
        None => s.serialize_none(),
    }
}

/// `v` rounded to 12 significant digits, printed as briefly as possible.
pub fn fmt_sig12(v: f64) -> String {
    if !v.is_finite() {
        return float_word(v).into();
    }
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let a = r.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn float_word(v: f64) -> &'static str {
    if v.is_nan() {
        "nan"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightEntry {
    pub beta: usize,
    pub node: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    /// Relative residual of the boundary-layer system (closed form) or the
    /// bordered system (oracle).
    #[serde(serialize_with = "float")]
    pub system: f64,
    /// Relative error of `Σ C_β x_β^α` against `∫ e^{2πiωx} x^α dx`, per `α < m`.
    pub exactness: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientReport {
    pub m: usize,
    pub omega: f64,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
    pub branch: &'static str,
    pub provenance: &'static str,
    #[serde(serialize_with = "float_opt")]
    pub k_factor: Option<f64>,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub coefficients: Vec<WeightEntry>,
}

/// Relative exactness errors on the monomials `x^α`, `α < m`.
pub fn exactness_errors(cv: &CoefficientVector) -> Vec<f64> {
    let s = &cv.spec;
    (0..s.m)
        .map(|al| {
            let samples: Vec<Complex64> = (0..=s.n)
                .map(|beta| Complex64::new(s.node(beta).powi(al as i32), 0.0))
                .collect();
            let got = cv.apply(&samples).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let exact = oqf_core::quadrature::exact_moment(al, s.omega, s.a, s.b);
            (got - exact).norm() / exact.norm().max(f64::MIN_POSITIVE)
        })
        .collect()
}

impl CoefficientReport {
    pub fn new(cv: &CoefficientVector) -> Self {
        let s = &cv.spec;
        let provenance = match cv.provenance {
            oqf_core::quadrature::Provenance::ClosedForm => "closed_form",
            oqf_core::quadrature::Provenance::Oracle => "oracle",
        };
        CoefficientReport {
            m: s.m,
            omega: s.omega,
            a: s.a,
            b: s.b,
            n: s.n,
            h: s.step(),
            branch: cv.branch.name(),
            provenance,
            k_factor: cv.k_factor.is_finite().then_some(cv.k_factor),
            residuals: Residuals {
                system: cv.system_residual,
                exactness: exactness_errors(cv),
            },
            condition_number: None,
            residual: None,
            coefficients: cv
                .values
                .iter()
                .enumerate()
                .map(|(beta, c)| WeightEntry {
                    beta,
                    node: s.node(beta),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    /// CSV table `beta,node,re,im`, preceded by `#` lines with the branch
    /// and residuals.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# m={} omega={} a={} b={} n={} branch={} provenance={}\n",
            self.m,
            fmt_sig12(self.omega),
            fmt_sig12(self.a),
            fmt_sig12(self.b),
            self.n,
            self.branch,
            self.provenance
        );
        out.push_str(&format!(
            "# system_residual={} exactness={}\n",
            fmt_sig12(self.residuals.system),
            self.residuals
                .exactness
                .iter()
                .map(|v| fmt_sig12(*v))
                .collect::<Vec<_>>()
                .join(";")
        ));
        if let Some(c) = self.condition_number {
            out.push_str(&format!("# condition_number={}\n", fmt_sig12(c)));
        }
        out.push_str("beta,node,re,im\n");
        for w in &self.coefficients {
            out.push_str(&format!(
                "{},{},{},{}\n",
                w.beta,
                fmt_sig12(w.node),
                fmt_sig12(w.re),
                fmt_sig12(w.im)
            ));
        }
        out
    }
}

/// One reconstruction's quality figures.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsEntry {
    pub method: String,
    pub m: Option<usize>,
    pub noise_seed: Option<u64>,
    #[serde(serialize_with = "float")]
    pub e_max: f64,
    #[serde(serialize_with = "float")]
    pub mse: f64,
    #[serde(serialize_with = "float")]
    pub psnr: f64,
    /// `None` when timing is switched off for reproducible output.
    pub runtime_ms: Option<u64>,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digit_rounding() {
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(0.1), "0.1");
        assert_eq!(fmt_sig12(-2.5e-7), "-2.5e-7");
        assert_eq!(fmt_sig12(123456789012345.0), "123456789012000");
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(f64::INFINITY), "inf");
    }

    #[test]
    fn infinite_psnr_is_a_string() {
        let e = MetricsEntry {
            method: "oqf".into(),
            m: Some(2),
            noise_seed: None,
            e_max: 0.0,
            mse: 0.0,
            psnr: f64::INFINITY,
            runtime_ms: None,
        };
        let v: serde_json::Value = serde_json::from_str(&to_json(&e)).unwrap();
        assert_eq!(v["psnr"], "inf");
        assert!(v["runtime_ms"].is_null());
    }

    #[test]
    fn json_keeps_full_precision() {
        let x = 0.1 + 0.2;
        let text = serde_json::to_string(&WeightEntry {
            beta: 0,
            node: 0.0,
            re: x,
            im: -x,
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["re"].as_f64().unwrap().to_bits(), x.to_bits());
    }
}
