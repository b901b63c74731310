use std::f64::consts::TAU;

use rotor_pair::diagnostics::{compare_analytic_numeric, detect_period, reduce_trajectory, CoordinateError, PeriodEstimate};
use rotor_pair::reduced3::{fit_constants, k_invariant, periods as period_pair, to_reduced};
use rotor_pair::{wrapped_distance, AnalyticSolution64, Coupling, ModelParams64};
use serde_json::{json, Value};

use super::{config_error, initial_state, metadata, model, run, write, CommandOutput, Destination};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Cell, Table};

const COORDS: [&str; 6] = ["chi", "amp_a", "xi", "amp_b", "theta", "eta"];

/// The reduction needs n = 3 with `Omega+ = Omega- = w i`.
fn axial_model(s: &Settings, command: &str) -> CliResult<(ModelParams64, Coupling)> {
    let coupling = s.coupling.unwrap_or(Coupling::Components);
    let params = model(s, coupling)?;
    if params.axial_rate().is_none() {
        return Err(config_error(format!(
            "{command} needs model.n = 3 and omega_plus = omega_minus = w i"
        )));
    }
    Ok((params, coupling))
}

fn constants_json(sol: &AnalyticSolution64) -> Value {
    json!({
        "k": sol.k,
        "c1": sol.c1,
        "c2": sol.c2,
        "c3": sol.c3,
        "b2": sol.b2,
        "a2": sol.a2,
        "omega_prime": sol.omega_prime,
        "delta": sol.delta,
    })
}

fn error_json(e: &CoordinateError<f64>) -> Value {
    json!({
        "max_wrapped": e.max_wrapped,
        "rms_wrapped": e.rms_wrapped,
        "max_unwrapped": e.max_unwrapped,
        "rms_unwrapped": e.rms_unwrapped,
        "time_of_max": e.time_of_max,
    })
}

/// Integrates, reduces, fits the closed form at `t = 0` and tabulates both side by side.
pub fn analytic(s: &Settings, dest: &Destination) -> CliResult<CommandOutput> {
    let (params, coupling) = axial_model(s, "analytic")?;
    let (a, b) = initial_state(s)?.vectors()?;
    let sol = fit_constants(&to_reduced(a, b), &params)?;
    let traj = run(s, &params, s.t_end)?;
    let cmp = compare_analytic_numeric(&traj, &sol)?;

    let mut columns = vec!["t".to_string()];
    for c in COORDS {
        columns.extend([c.to_string(), format!("{c}_analytic"), format!("{c}_error")]);
    }
    let mut meta = metadata("analytic", s, dest.format, coupling);
    meta.extend([
        ("k".to_string(), format!("{:?}", sol.k)),
        ("omega_prime".to_string(), format!("{:?}", sol.omega_prime)),
        ("delta".to_string(), format!("{:?}", sol.delta)),
    ]);
    let mut table = Table { meta, columns, rows: Vec::with_capacity(cmp.rows.len()) };
    for row in &cmp.rows {
        let (x, y) = (row.numeric.to_array(), row.analytic.to_array());
        let mut cells: Vec<Cell> = vec![row.t.into()];
        for i in 0..6 {
            let angle = i % 2 == 0 || i == 5;
            let err = if angle { wrapped_distance(x[i], y[i]) } else { (x[i] - y[i]).abs() };
            cells.extend([x[i].into(), y[i].into(), err.into()]);
        }
        table.push(cells);
    }
    let path = write(&table, &dest.resolve("analytic"), dest.format)?;

    let errors: serde_json::Map<String, Value> =
        cmp.named().iter().map(|(name, e)| (name.to_string(), error_json(e))).collect();
    let mut summary = json!({
        "command": "analytic",
        "coupling": coupling.name(),
        "output": path.display().to_string(),
        "constants": constants_json(&sol),
        "errors": errors,
        "max_angle_error": cmp.max_angle_error(),
    });
    if coupling == Coupling::Bracket {
        summary["note"] = json!("the closed form solves the components flow; K is not conserved here");
    }
    Ok(CommandOutput::new(summary, vec![path]))
}

struct Detection {
    quantity: &'static str,
    signal: &'static str,
    predicted: Option<f64>,
    result: Result<PeriodEstimate<f64>, String>,
}

/// Predicted and detected fast and slow periods. The slow phase `(xi, eta)` repeats with
/// `2 pi / |S|` and `chi` with `4 pi / |S|`, `S = eps w B^2 K`.
pub fn periods(s: &Settings, dest: &Destination) -> CliResult<CommandOutput> {
    let (params, coupling) = axial_model(s, "periods")?;
    let (a, b) = initial_state(s)?.vectors()?;
    let rc0 = to_reduced(a, b);
    let w = params.axial_rate().expect("checked by axial_model");
    let k = k_invariant(&rc0);

    let (sol, mut notes) = match fit_constants(&rc0, &params) {
        Ok(sol) => (Some(sol), Vec::new()),
        Err(e) => (None, vec![format!("closed form unavailable: {e}")]),
    };
    let t_fast = match &sol {
        Some(sol) if sol.omega_prime != 0.0 => Some(TAU / sol.omega_prime.abs()),
        None if s.eps == 0.0 && w != 0.0 => Some(TAU / w.abs()),
        _ => None,
    };
    let slow = sol.as_ref().and_then(|sol| period_pair(sol).ok());
    if slow.is_none() {
        notes.push(if s.eps == 0.0 {
            "eps = 0: no slow period".to_string()
        } else {
            "eps w B^2 K = 0: the slow period diverges".to_string()
        });
    }

    let traj = run(s, &params, s.t_end)?;
    let reduced = reduce_trajectory(&traj)?;
    let spacing = traj.sample_spacing();
    let series = |f: fn(&rotor_pair::ReducedCoords64) -> f64| reduced.iter().map(|(_, r)| f(r)).collect::<Vec<f64>>();
    let detect = |quantity, signal, values: Vec<f64>, predicted: Option<f64>| Detection {
        quantity,
        signal,
        predicted,
        result: detect_period(&values, spacing, predicted).map_err(|e| e.to_string()),
    };
    let found = [
        detect("t_fast", "cos theta", series(|r| r.theta.cos()), t_fast),
        detect("t_phase", "cos 2xi", series(|r| (2.0 * r.xi).cos()), slow.map(|p| p.t_phase)),
        detect("t_slow", "cos chi", series(|r| r.chi.cos()), slow.map(|p| p.t_slow)),
    ];

    let mut meta = metadata("periods", s, dest.format, coupling);
    meta.push(("k".to_string(), format!("{k:?}")));
    let cols = ["quantity", "signal", "predicted", "detected", "confidence", "relative_error", "note"];
    let mut table = Table::new(meta, &cols);
    let mut report = serde_json::Map::new();
    for d in &found {
        let (detected, confidence, rel, note) = match &d.result {
            Ok(e) => (Some(e.period), Some(e.confidence), e.relative_error, String::new()),
            Err(msg) => (None, None, None, format!("not detected: {msg}")),
        };
        table.push(vec![
            d.quantity.into(),
            d.signal.into(),
            d.predicted.into(),
            detected.into(),
            confidence.into(),
            rel.into(),
            if note.is_empty() { Cell::Missing } else { Cell::Text(note.clone()) },
        ]);
        report.insert(
            d.quantity.to_string(),
            json!({
                "signal": d.signal,
                "predicted": d.predicted,
                "detected": detected,
                "confidence": confidence,
                "relative_error": rel,
                "note": if note.is_empty() { Value::Null } else { json!(note) },
            }),
        );
    }
    let path = write(&table, &dest.resolve("periods"), dest.format)?;
    let summary = json!({
        "command": "periods",
        "coupling": coupling.name(),
        "output": path.display().to_string(),
        "k": k,
        "constants": sol.as_ref().map(constants_json),
        "periods": report,
        "notes": notes,
    });
    Ok(CommandOutput::new(summary, vec![path]))
}
