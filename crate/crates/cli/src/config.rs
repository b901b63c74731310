//! Run configuration: a TOML file with the sections `[model]`, `[initial]`,
//! `[integration]`, `[output]`, `[verify]` and `[sweep]` plus a top-level `seed`.
//! Every key is optional; unknown keys are rejected. See `docs/config.md`.

use std::path::{Path, PathBuf};

use rotor_pair::{Coupling, SkewMatrix64, Vector3};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const DEFAULT_N: usize = 3;
pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_OMEGA: f64 = 1.0;
pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_T_END: f64 = 100.0;
pub const DEFAULT_SAMPLE_EVERY: usize = 10;
pub const DEFAULT_A0: [f64; 3] = [1.0, 1.0, 0.0];
pub const DEFAULT_B0: [f64; 3] = [0.0, 0.0, 1.0];
pub const DEFAULT_SWEEP_EPS: [f64; 5] = [0.0, 0.05, 0.1, 0.2, 0.5];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n: Option<usize>,
    pub eps: Option<f64>,
    pub omega: Option<f64>,
    pub omega_plus: Option<MatrixInput>,
    pub omega_minus: Option<MatrixInput>,
    pub coupling: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub a: Option<MatrixInput>,
    pub b: Option<MatrixInput>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub h: Option<f64>,
    pub t_end: Option<f64>,
    pub sample_every: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub bracket_samples: Option<usize>,
    pub skew_tol: Option<f64>,
    pub jacobi_tol: Option<f64>,
    pub drift_tol: Option<f64>,
    pub k_drift_tol: Option<f64>,
    pub oracle_points: Option<usize>,
    pub oracle_tol: Option<f64>,
    pub analytic_t_end: Option<f64>,
    pub analytic_tol: Option<f64>,
    pub chi_slope_tol: Option<f64>,
    pub exact_drift_tol: Option<f64>,
    pub exact_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub eps: Option<Vec<f64>>,
    pub threads: Option<usize>,
}

/// A skew matrix given as a 3-vector (n = 3, through the hat map), as its strict upper
/// triangle in row order, or as full rows.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format '{other}' (expected csv or jsonl)")),
        }
    }
}

/// Check thresholds of the `verify` command.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub bracket_samples: usize,
    pub skew_tol: f64,
    pub jacobi_tol: f64,
    pub drift_tol: f64,
    pub k_drift_tol: f64,
    pub oracle_points: usize,
    pub oracle_tol: f64,
    pub analytic_t_end: f64,
    pub analytic_tol: f64,
    pub chi_slope_tol: f64,
    pub exact_drift_tol: f64,
    pub exact_tol: f64,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub n: usize,
    pub eps: f64,
    /// `None` leaves the choice to the command.
    pub coupling: Option<Coupling>,
    pub omega_plus: SkewMatrix64,
    pub omega_minus: SkewMatrix64,
    pub a0: SkewMatrix64,
    pub b0: SkewMatrix64,
    pub h: f64,
    pub t_end: f64,
    pub sample_every: usize,
    pub format: Format,
    pub path: Option<PathBuf>,
    pub verify: VerifySettings,
    pub sweep_eps: Vec<f64>,
    pub sweep_threads: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn resolve(&self) -> CliResult<Settings> {
        let m = &self.model;
        let n = m.n.unwrap_or(DEFAULT_N);
        if n < 2 {
            return Err(field("model.n", "must be at least 2"));
        }
        let eps = finite("model.eps", m.eps.unwrap_or(DEFAULT_EPS))?;
        let omega = finite("model.omega", m.omega.unwrap_or(DEFAULT_OMEGA))?;
        let coupling = m
            .coupling
            .as_deref()
            .map(|s| s.parse::<Coupling>().map_err(|e| field("model.coupling", &e.to_string())))
            .transpose()?;
        let axial = embed3(n, Vector3::new(omega, 0.0, 0.0));
        let omega_plus = optional_matrix("model.omega_plus", n, m.omega_plus.as_ref())?
            .unwrap_or_else(|| axial.clone());
        let omega_minus =
            optional_matrix("model.omega_minus", n, m.omega_minus.as_ref())?.unwrap_or(axial);
        let a0 = optional_matrix("initial.a", n, self.initial.a.as_ref())?
            .unwrap_or_else(|| embed3(n, Vector3::from_array(DEFAULT_A0)));
        let b0 = optional_matrix("initial.b", n, self.initial.b.as_ref())?
            .unwrap_or_else(|| embed3(n, Vector3::from_array(DEFAULT_B0)));

        let g = &self.integration;
        let h = finite("integration.h", g.h.unwrap_or(DEFAULT_H))?;
        if h <= 0.0 {
            return Err(field("integration.h", "must be positive"));
        }
        let t_end = finite("integration.t_end", g.t_end.unwrap_or(DEFAULT_T_END))?;
        if t_end < 0.0 {
            return Err(field("integration.t_end", "must not be negative"));
        }
        let sample_every = g.sample_every.unwrap_or(DEFAULT_SAMPLE_EVERY);
        if sample_every == 0 {
            return Err(field("integration.sample_every", "must be at least 1"));
        }

        let v = &self.verify;
        let tol = |name: &str, x: Option<f64>, default: f64| -> CliResult<f64> {
            let x = finite(name, x.unwrap_or(default))?;
            if x < 0.0 {
                return Err(field(name, "must not be negative"));
            }
            Ok(x)
        };
        let verify = VerifySettings {
            bracket_samples: v.bracket_samples.unwrap_or(100),
            skew_tol: tol("verify.skew_tol", v.skew_tol, 1e-12)?,
            jacobi_tol: tol("verify.jacobi_tol", v.jacobi_tol, 1e-10)?,
            drift_tol: tol("verify.drift_tol", v.drift_tol, 1e-6)?,
            k_drift_tol: tol("verify.k_drift_tol", v.k_drift_tol, 1e-6)?,
            oracle_points: v.oracle_points.unwrap_or(1000),
            oracle_tol: tol("verify.oracle_tol", v.oracle_tol, 1e-6)?,
            analytic_t_end: tol("verify.analytic_t_end", v.analytic_t_end, 50.0)?,
            analytic_tol: tol("verify.analytic_tol", v.analytic_tol, 1e-4)?,
            chi_slope_tol: tol("verify.chi_slope_tol", v.chi_slope_tol, 1e-4)?,
            exact_drift_tol: tol("verify.exact_drift_tol", v.exact_drift_tol, 1e-10)?,
            exact_tol: tol("verify.exact_tol", v.exact_tol, 1e-8)?,
        };

        let sweep_eps = self.sweep.eps.clone().unwrap_or_else(|| DEFAULT_SWEEP_EPS.to_vec());
        if sweep_eps.is_empty() {
            return Err(field("sweep.eps", "must list at least one value"));
        }
        for (i, &e) in sweep_eps.iter().enumerate() {
            finite(&format!("sweep.eps[{i}]"), e)?;
        }
        if self.sweep.threads == Some(0) {
            return Err(field("sweep.threads", "must be at least 1"));
        }

        Ok(Settings {
            seed: self.seed.unwrap_or(0),
            n,
            eps,
            coupling,
            omega_plus,
            omega_minus,
            a0,
            b0,
            h,
            t_end,
            sample_every,
            format: self.output.format.unwrap_or_default(),
            path: self.output.path.clone(),
            verify,
            sweep_eps,
            sweep_threads: self.sweep.threads,
        })
    }
}

fn field(name: &str, msg: &str) -> CliError {
    CliError::Config(format!("{name}: {msg}"))
}

fn finite(name: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(field(name, "must be finite"))
    }
}

/// `hat(v)` in the leading 3x3 block of an n x n zero matrix (for n = 2 only the `(0,1)`
/// entry survives).
fn embed3(n: usize, v: Vector3<f64>) -> SkewMatrix64 {
    let h = SkewMatrix64::hat(v);
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            upper.push(if j < 3 { h.get(i, j) } else { 0.0 });
        }
    }
    SkewMatrix64::from_upper(n, &upper).expect("upper triangle length matches")
}

fn optional_matrix(name: &str, n: usize, input: Option<&MatrixInput>) -> CliResult<Option<SkewMatrix64>> {
    let Some(input) = input else { return Ok(None) };
    let bad = |msg: String| field(name, &msg);
    let m = match input {
        MatrixInput::Flat(v) if n == 3 && v.len() == 3 => SkewMatrix64::hat(Vector3::new(v[0], v[1], v[2])),
        MatrixInput::Flat(v) if v.len() == n * (n - 1) / 2 => {
            SkewMatrix64::from_upper(n, v).map_err(|e| bad(e.to_string()))?
        }
        MatrixInput::Flat(v) => {
            return Err(bad(format!(
                "expected {} values for n = {n}, got {}",
                if n == 3 { 3 } else { n * (n - 1) / 2 },
                v.len()
            )))
        }
        MatrixInput::Rows(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(bad(format!("expected {n} rows of {n} values")));
            }
            SkewMatrix64::from_rows(rows).map_err(|e| bad(e.to_string()))?
        }
    };
    if !m.is_finite() {
        return Err(bad("entries must be finite".into()));
    }
    Ok(Some(m))
}
