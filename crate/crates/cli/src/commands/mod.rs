//! The five subcommands. Each returns the table it wrote and a JSON summary for stdout.

mod analytic;
mod verify;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rotor_pair::diagnostics::{measure_drift, DriftReport, InvariantDrift};
use rotor_pair::dynamics::integrate;
use rotor_pair::{Coupling, CoupledState64, ModelParams64, SkewMatrix64, Trajectory64};
use serde_json::{json, Value};

use crate::config::{Format, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{resolve_path, tagged_path, Cell, Table};

pub use analytic::{analytic, periods};
pub use verify::verify;

/// Where and how a command writes its table.
#[derive(Debug, Clone)]
pub struct Destination {
    /// Explicit path (flag, then config); `None` picks `<command>.<ext>`.
    pub path: Option<PathBuf>,
    pub format: Format,
    /// Replacement directory from the environment.
    pub env_dir: Option<PathBuf>,
}

impl Destination {
    pub fn resolve(&self, stem: &str) -> PathBuf {
        resolve_path(self.path.as_deref(), stem, self.format, self.env_dir.as_deref())
    }
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub summary: Value,
    pub files: Vec<PathBuf>,
    /// Failed checks; only `verify` sets this.
    pub failed: usize,
    pub total: usize,
}

impl CommandOutput {
    fn new(summary: Value, files: Vec<PathBuf>) -> Self {
        Self { summary, files, failed: 0, total: 0 }
    }
}

/// The configured model with `coupling` filled in.
pub(crate) fn model(s: &Settings, coupling: Coupling) -> CliResult<ModelParams64> {
    Ok(ModelParams64::new(s.eps, s.omega_plus.clone(), s.omega_minus.clone())?.with_coupling(coupling))
}

pub(crate) fn initial_state(s: &Settings) -> CliResult<CoupledState64> {
    Ok(CoupledState64::new(0.0, s.a0.clone(), s.b0.clone())?)
}

pub(crate) fn run(s: &Settings, params: &ModelParams64, t_end: f64) -> CliResult<Trajectory64> {
    Ok(integrate(&initial_state(s)?, params, s.h, t_end, s.sample_every)?)
}

fn fmt_matrix(m: &SkewMatrix64) -> String {
    match m.unhat() {
        Ok(v) => format!("{:?}", v.to_array()),
        Err(_) => format!("{:?}", m.dense().rows()),
    }
}

/// Every resolved setting, for the output header.
pub(crate) fn metadata(command: &str, s: &Settings, format: Format, coupling: Coupling) -> Vec<(String, String)> {
    let mut meta = vec![
        ("command", command.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("seed", s.seed.to_string()),
        ("n", s.n.to_string()),
        ("eps", format!("{:?}", s.eps)),
        ("coupling", coupling.name().to_string()),
        ("omega_plus", fmt_matrix(&s.omega_plus)),
        ("omega_minus", fmt_matrix(&s.omega_minus)),
        ("a0", fmt_matrix(&s.a0)),
        ("b0", fmt_matrix(&s.b0)),
        ("h", format!("{:?}", s.h)),
        ("t_end", format!("{:?}", s.t_end)),
        ("sample_every", s.sample_every.to_string()),
        ("format", format.extension().to_string()),
    ];
    meta.push(("defaults", "n=3 eps=0.1 omega=1 h=0.001 t_end=100 a0=[1,1,0] b0=[0,0,1]".into()));
    meta.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn drift_json(d: &InvariantDrift<f64>) -> Value {
    json!({ "initial": d.initial, "max_abs": d.max_abs, "max_rel": d.max_rel, "time_of_max": d.time_of_max })
}

pub(crate) fn drift_report_json(d: &DriftReport<f64>) -> Value {
    json!({
        "energy": drift_json(&d.energy),
        "alignment": d.alignment.as_ref().map(drift_json),
        "k_reduced": d.k_reduced.as_ref().map(drift_json),
    })
}

/// Column names of a trajectory table: hat components for n = 3, upper-triangle entries
/// `a_<i>_<j>` otherwise.
fn trajectory_columns(n: usize) -> Vec<String> {
    let entries: Vec<String> = if n == 3 {
        ["i", "j", "k"].iter().map(|c| c.to_string()).collect()
    } else {
        (0..n).flat_map(|i| (i + 1..n).map(move |j| format!("{i}_{j}"))).collect()
    };
    let mut cols = vec!["t".to_string()];
    cols.extend(entries.iter().map(|e| format!("a_{e}")));
    cols.extend(entries.iter().map(|e| format!("b_{e}")));
    cols.extend(["energy", "alignment", "k_reduced"].map(String::from));
    cols
}

fn entries(m: &SkewMatrix64) -> Vec<f64> {
    match m.unhat() {
        Ok(v) => v.to_array().to_vec(),
        Err(_) => m.upper(),
    }
}

pub(crate) fn trajectory_table(traj: &Trajectory64, meta: Vec<(String, String)>) -> Table {
    let columns = trajectory_columns(traj.params.n());
    let mut table = Table { meta, columns, rows: Vec::with_capacity(traj.samples.len()) };
    for s in &traj.samples {
        let mut row: Vec<Cell> = vec![s.state.t.into()];
        row.extend(entries(&s.state.a).into_iter().map(Cell::from));
        row.extend(entries(&s.state.b).into_iter().map(Cell::from));
        row.push(s.invariants.energy.into());
        row.push(s.invariants.alignment.into());
        row.push(s.invariants.k_reduced.into());
        table.push(row);
    }
    table
}

fn write(table: &Table, path: &Path, format: Format) -> CliResult<PathBuf> {
    table.write_file(path, format)?;
    Ok(path.to_path_buf())
}

/// Integrates the configured system (bracket flow unless `model.coupling` says otherwise).
pub fn simulate(s: &Settings, dest: &Destination) -> CliResult<CommandOutput> {
    let coupling = s.coupling.unwrap_or(Coupling::Bracket);
    let params = model(s, coupling)?;
    let traj = run(s, &params, s.t_end)?;
    let path = write(&trajectory_table(&traj, metadata("simulate", s, dest.format, coupling)), &dest.resolve("simulate"), dest.format)?;
    let summary = json!({
        "command": "simulate",
        "coupling": coupling.name(),
        "output": path.display().to_string(),
        "samples": traj.samples.len(),
        "t_final": traj.last().t,
        "max_skew_correction": traj.max_skew_correction,
        "drift": drift_report_json(&measure_drift(&traj)),
    });
    Ok(CommandOutput::new(summary, vec![path]))
}

/// One simulation per `sweep.eps` value, run on a pool of scoped threads. File `i` is
/// `<output>.eps-<iii>.<ext>`.
pub fn sweep(s: &Settings, dest: &Destination) -> CliResult<CommandOutput> {
    let coupling = s.coupling.unwrap_or(Coupling::Bracket);
    let base = dest.resolve("sweep");
    let count = s.sweep_eps.len();
    let threads = s
        .sweep_threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .min(count);
    let next = AtomicUsize::new(0);
    let job = |i: usize| -> CliResult<Value> {
        let mut one = s.clone();
        one.eps = s.sweep_eps[i];
        let params = model(&one, coupling)?;
        let traj = run(&one, &params, one.t_end)?;
        let mut meta = metadata("sweep", &one, dest.format, coupling);
        meta.push(("sweep_index".into(), i.to_string()));
        let path = write(&trajectory_table(&traj, meta), &tagged_path(&base, &format!("eps-{i:03}")), dest.format)?;
        Ok(json!({
            "index": i,
            "eps": one.eps,
            "output": path.display().to_string(),
            "max_skew_correction": traj.max_skew_correction,
            "drift": drift_report_json(&measure_drift(&traj)),
        }))
    };
    let mut results: Vec<(usize, CliResult<Value>)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= count {
                            return done;
                        }
                        done.push((i, job(i)));
                    }
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("sweep worker panicked")).collect()
    });
    results.sort_by_key(|(i, _)| *i);
    let mut runs = Vec::with_capacity(count);
    let mut files = Vec::with_capacity(count);
    for (_, r) in results {
        let v = r?;
        files.push(PathBuf::from(v["output"].as_str().unwrap_or_default()));
        runs.push(v);
    }
    let summary = json!({ "command": "sweep", "coupling": coupling.name(), "runs": runs });
    Ok(CommandOutput::new(summary, files))
}

pub(crate) fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
