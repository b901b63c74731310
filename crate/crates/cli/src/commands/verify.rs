use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotor_pair::diagnostics::{compare_analytic_numeric, linear_fit, measure_drift, reduce_trajectory, InvariantDrift};
use rotor_pair::liealg::{commutator, deformed_bracket_v1, deformed_bracket_v2, jacobi_relative_residual};
use rotor_pair::reduced3::{fit_constants, from_reduced, reduced_rhs, to_reduced, ReducedTracker};
use rotor_pair::{dynamics, Coupling, Mat, CoupledState64, ModelParams64, ReducedCoords64, SkewMatrix64};
use serde_json::{json, Value};

use super::{initial_state, metadata, model, run, write, CommandOutput, Destination};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Cell, Table};

#[derive(Debug, Clone)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    /// `None`: reported only.
    passed: Option<bool>,
    detail: String,
}

impl Check {
    fn bound(name: impl Into<String>, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let passed = Some(value <= tolerance);
        Self { name: name.into(), value, tolerance, passed, detail: detail.into() }
    }

    fn info(name: impl Into<String>, value: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), value, tolerance: f64::NAN, passed: None, detail: detail.into() }
    }

    fn status(&self) -> &'static str {
        match self.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "info",
        }
    }

    fn json(&self) -> Value {
        json!({
            "name": self.name,
            "status": self.status(),
            "value": self.value,
            "tolerance": if self.tolerance.is_nan() { Value::Null } else { json!(self.tolerance) },
            "detail": self.detail,
        })
    }
}

fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> SkewMatrix64 {
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SkewMatrix64::from_upper(n, &upper).expect("upper triangle length matches")
}

fn bracket_checks(s: &Settings, rng: &mut ChaCha8Rng) -> CliResult<Vec<Check>> {
    let mut dims = vec![3, 4, 5, s.n];
    dims.sort_unstable();
    dims.dedup();
    let mut epsilons = vec![0.0, 0.1, 1.0, s.eps];
    epsilons.sort_by(f64::total_cmp);
    epsilons.dedup();
    let (mut antisym, mut jacobi, mut jacobi_comm) = (0.0f64, 0.0f64, 0.0f64);
    for &n in &dims {
        for &eps in &epsilons {
            for _ in 0..s.verify.bracket_samples {
                let (x, y, z, a) = (random_skew(rng, n), random_skew(rng, n), random_skew(rng, n), random_skew(rng, n));
                let xy = deformed_bracket_v1(&x, &y, &a, eps)?;
                let yx = deformed_bracket_v1(&y, &x, &a, eps)?;
                antisym = antisym.max(xy.checked_add(&yx)?.max_abs());
                let b1 = |p: &SkewMatrix64, q: &SkewMatrix64| deformed_bracket_v1(p, q, &a, eps);
                let b2 = |p: &SkewMatrix64, q: &SkewMatrix64| deformed_bracket_v2(p, q, &a, eps);
                jacobi = jacobi
                    .max(jacobi_relative_residual(b1, &x, &y, &z)?)
                    .max(jacobi_relative_residual(b2, &x, &y, &z)?);
                jacobi_comm = jacobi_comm.max(jacobi_relative_residual(commutator, &x, &y, &z)?);
            }
        }
    }
    let scope = format!("n in {dims:?}, eps in {epsilons:?}, {} samples each", s.verify.bracket_samples);
    Ok(vec![
        Check::bound("bracket_antisymmetry", antisym, s.verify.skew_tol, scope.clone()),
        Check::bound("bracket_jacobi", jacobi, s.verify.jacobi_tol, format!("relative residual, {scope}")),
        Check::bound("commutator_jacobi", jacobi_comm, s.verify.jacobi_tol, format!("relative residual, n in {dims:?}")),
    ])
}

fn drift_tol(s: &Settings) -> (f64, &'static str) {
    if s.eps == 0.0 {
        (s.verify.exact_drift_tol, "eps = 0")
    } else {
        (s.verify.drift_tol, "")
    }
}

/// The bracket flow changes `<W,A>` at the rate `eps Tr(W^2 [B^2, A])`; the two terms of
/// `dJ/dt` cancel in so(3) and whenever `W^2` is a multiple of the identity.
fn alignment_is_integral(params: &ModelParams64) -> bool {
    let Some(w) = params.shared_omega() else { return false };
    if params.coupling == Coupling::Components || params.n() == 3 {
        return true;
    }
    let w2 = w.dense() * w.dense();
    let c = w2.trace() / params.n() as f64;
    let off = w2.checked_sub(&Mat::identity(params.n()).scale(c)).map_or(f64::INFINITY, |m| m.max_abs());
    off <= 1e-12 * c.abs().max(1.0)
}

fn drift_checks(s: &Settings, coupling: Coupling) -> CliResult<Vec<Check>> {
    let params = model(s, coupling)?;
    let traj = run(s, &params, s.t_end)?;
    let d = measure_drift(&traj);
    let (tol, tag) = drift_tol(s);
    let what = |d: &InvariantDrift<f64>| format!("{} flow, t_end = {}, max at t = {} {tag}", coupling.name(), s.t_end, d.time_of_max);
    let mut checks = Vec::new();
    if params.shared_omega().is_some() {
        checks.push(Check::bound("energy_drift", d.energy.max_rel, tol, what(&d.energy)));
    } else {
        checks.push(Check::info("energy_drift", d.energy.max_rel, "not conserved for omega_plus != omega_minus"));
    }
    if let Some(al) = &d.alignment {
        if alignment_is_integral(&params) {
            checks.push(Check::bound("alignment_drift", al.max_rel, tol, what(al)));
        } else {
            checks.push(Check::info("alignment_drift", al.max_rel, "J is not an integral of the bracket flow for n > 3 unless W^2 is a multiple of 1"));
        }
    }
    let scale = s.a0.max_abs().max(s.b0.max_abs()).max(1.0);
    checks.push(Check::bound(
        "skew_projection",
        traj.max_skew_correction / scale,
        s.verify.skew_tol,
        "largest per-step symmetric part removed, relative to the state scale",
    ));
    if coupling == Coupling::Bracket {
        if let Some(k) = &d.k_reduced {
            checks.push(Check::info("k_drift_bracket", k.max_rel, "K is not an invariant of the bracket flow"));
        }
    }
    Ok(checks)
}

/// Finite-difference rates of the reduced coordinates along the matrix flow.
fn numeric_rates(rc: &ReducedCoords64, params: &ModelParams64, delta: f64) -> CliResult<[f64; 6]> {
    let (a, b) = from_reduced(rc);
    let state = CoupledState64::from_vectors(0.0, a, b)?;
    let (da, db) = dynamics::rhs(&state, params)?;
    let (va, vb) = (da.unhat()?, db.unhat()?);
    let side = |sign: f64| {
        let mut tracker = ReducedTracker::new();
        tracker.push(a, b);
        tracker.push(a + va.scale(sign * delta), b + vb.scale(sign * delta)).to_array()
    };
    let (plus, minus) = (side(1.0), side(-1.0));
    Ok(std::array::from_fn(|i| (plus[i] - minus[i]) / (2.0 * delta)))
}

fn random_reduced(rng: &mut ChaCha8Rng) -> ReducedCoords64 {
    let margin = 0.05;
    ReducedCoords64 {
        chi: rng.gen_range(-PI..PI),
        amp_a: rng.gen_range(0.2..2.0),
        xi: rng.gen_range(margin..FRAC_PI_2 - margin),
        amp_b: rng.gen_range(0.2..2.0),
        theta: rng.gen_range(-PI..PI),
        eta: rng.gen_range(-PI..PI),
    }
}

fn oracle_check(s: &Settings, coupling: Coupling, rng: &mut ChaCha8Rng) -> CliResult<Check> {
    let params = model(s, coupling)?;
    let mut worst = 0.0f64;
    for _ in 0..s.verify.oracle_points {
        let rc = random_reduced(rng);
        let closed = reduced_rhs(&rc, &params)?.to_array();
        let fd = numeric_rates(&rc, &params, 1e-6)?;
        for (c, f) in closed.iter().zip(fd) {
            worst = worst.max((c - f).abs() / c.abs().max(1.0));
        }
    }
    Ok(Check::bound(
        format!("reduced_rates_{}", coupling.name()),
        worst,
        s.verify.oracle_tol,
        format!("{} random states against central differences of the matrix flow", s.verify.oracle_points),
    ))
}

fn axial_checks(s: &Settings, rng: &mut ChaCha8Rng) -> CliResult<Vec<Check>> {
    let exact = s.eps == 0.0;
    let params = model(s, Coupling::Components)?;
    let mut checks = Vec::new();

    let d = measure_drift(&run(s, &params, s.t_end)?);
    let k = d.k_reduced.expect("axial parameters report K");
    let k_tol = if exact { s.verify.exact_drift_tol } else { s.verify.k_drift_tol };
    checks.push(Check::bound("k_drift_components", k.max_rel, k_tol, format!("components flow, t_end = {}", s.t_end)));

    checks.push(oracle_check(s, Coupling::Bracket, rng)?);
    checks.push(oracle_check(s, Coupling::Components, rng)?);

    let (a, b) = initial_state(s)?.vectors()?;
    let traj = run(s, &params, s.verify.analytic_t_end)?;
    match fit_constants(&to_reduced(a, b), &params) {
        Ok(sol) => {
            let cmp = compare_analytic_numeric(&traj, &sol)?;
            let tol = if exact { s.verify.exact_tol } else { s.verify.analytic_tol };
            checks.push(Check::bound(
                "closed_form",
                cmp.max_angle_error(),
                tol,
                format!("largest wrapped angle error over [0, {}], K = {}", s.verify.analytic_t_end, sol.k),
            ));
            let reduced = reduce_trajectory(&traj)?;
            let (t, chi): (Vec<f64>, Vec<f64>) = reduced.iter().map(|(t, r)| (*t, r.chi)).unzip();
            if t.len() >= 2 {
                let (slope, _, rms) = linear_fit(&t, &chi);
                let expected = -0.5 * sol.slow_rate();
                let (value, tol) = if exact {
                    (slope.abs(), s.verify.exact_tol)
                } else {
                    ((slope - expected).abs() / expected.abs(), s.verify.chi_slope_tol)
                };
                checks.push(Check::bound(
                    "chi_slope",
                    value,
                    tol,
                    format!("slope {slope}, expected {expected}, fit rms {rms}"),
                ));
            }
        }
        Err(e) => checks.push(Check::info("closed_form", f64::NAN, format!("skipped: {e}"))),
    }

    let mut worst = 0.0f64;
    for k in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
        for sign in [1.0, -1.0] {
            let kk: f64 = sign * k;
            let rc = ReducedCoords64 { chi: 0.0, amp_a: 1.0, xi: FRAC_PI_4, amp_b: 1.0, theta: 0.0, eta: kk.asin() };
            let sol = fit_constants(&rc, &params)?;
            worst = worst.max((sol.delta + 0.5 * sign).abs());
        }
    }
    checks.push(Check::bound("delta_constant", worst, s.verify.exact_tol, "|Delta + sgn(K)/2| over |K| in [0.1, 0.99]"));
    Ok(checks)
}

/// Runs every applicable check; the reduced-coordinate checks need n = 3 with
/// `Omega+ = Omega- = w i`.
pub fn verify(s: &Settings, dest: &Destination) -> CliResult<CommandOutput> {
    let coupling = s.coupling.unwrap_or(Coupling::Bracket);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut checks = bracket_checks(s, &mut rng)?;
    checks.extend(drift_checks(s, coupling)?);
    if model(s, coupling)?.axial_rate().is_some() {
        checks.extend(axial_checks(s, &mut rng)?);
    } else {
        checks.push(Check::info("reduced", f64::NAN, "skipped: needs n = 3 and omega_plus = omega_minus = w i"));
    }

    let mut table = Table::new(metadata("verify", s, dest.format, coupling), &["check", "status", "value", "tolerance", "detail"]);
    for c in &checks {
        let tol = if c.tolerance.is_nan() { Cell::Missing } else { c.tolerance.into() };
        table.push(vec![c.name.as_str().into(), c.status().into(), c.value.into(), tol, c.detail.as_str().into()]);
    }
    let path = write(&table, &dest.resolve("verify"), dest.format)?;
    let total = checks.iter().filter(|c| c.passed.is_some()).count();
    let failed = checks.iter().filter(|c| c.passed == Some(false)).count();
    let summary = json!({
        "command": "verify",
        "coupling": coupling.name(),
        "output": path.display().to_string(),
        "passed": total - failed,
        "failed": failed,
        "checks": checks.iter().map(Check::json).collect::<Vec<_>>(),
    });
    Ok(CommandOutput { summary, files: vec![path], failed, total })
}
