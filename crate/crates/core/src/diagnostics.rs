//! Trajectory analysis: invariant drift, period detection and closed-form comparison.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::reduced3::{analytic_coords, AnalyticSolution, ReducedCoords, ReducedTracker};
use crate::scalar::{wrapped_distance, Real};

/// Floor on the denominator of relative deviations.
pub const RELATIVE_FLOOR: f64 = 1e-14;

/// Drift statistics of one conserved quantity along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantDrift<T> {
    pub initial: T,
    pub max_abs: T,
    /// `max_abs / max(|initial|, 1e-14)`.
    pub max_rel: T,
    pub time_of_max: T,
}

impl<T: Real> InvariantDrift<T> {
    /// Drift of `values` against its first element. Panics on empty input.
    pub fn of_series(times: &[T], values: &[T]) -> Self {
        assert!(!values.is_empty() && times.len() == values.len());
        let initial = values[0];
        let mut max_abs = T::zero();
        let mut time_of_max = times[0];
        for (&t, &v) in times.iter().zip(values) {
            let d = (v - initial).abs();
            if d > max_abs || d.is_nan() {
                max_abs = d;
                time_of_max = t;
            }
        }
        let max_rel = max_abs / initial.abs().max(T::lit(RELATIVE_FLOOR));
        Self { initial, max_abs, max_rel, time_of_max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftReport<T> {
    pub energy: InvariantDrift<T>,
    pub alignment: Option<InvariantDrift<T>>,
    pub k_reduced: Option<InvariantDrift<T>>,
}

pub fn measure_drift<T: Real>(traj: &Trajectory<T>) -> DriftReport<T> {
    let times = traj.times();
    let column = |f: &dyn Fn(usize) -> Option<T>| -> Option<InvariantDrift<T>> {
        let vals: Option<Vec<T>> = (0..traj.samples.len()).map(f).collect();
        vals.map(|v| InvariantDrift::of_series(&times, &v))
    };
    DriftReport {
        energy: column(&|i| Some(traj.samples[i].invariants.energy)).expect("always present"),
        alignment: column(&|i| traj.samples[i].invariants.alignment),
        k_reduced: column(&|i| traj.samples[i].invariants.k_reduced),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate<T> {
    pub period: T,
    /// Autocorrelation at the detected lag relative to zero lag.
    pub confidence: T,
    pub predicted: Option<T>,
    pub relative_error: Option<T>,
}

/// Minimum normalized autocorrelation accepted as a period.
pub const MIN_CONFIDENCE: f64 = 0.5;

/// Among local maxima, the first one at least this fraction of the tallest wins.
const PEAK_FRACTION: f64 = 0.9;

/// Normalized square difference function of the mean-removed series,
/// `n(k) = 2 sum x_i x_{i+k} / sum (x_i^2 + x_{i+k}^2)` over the overlap, for lags
/// `0..=max_lag`. `n(0) = 1`, `|n(k)| <= 1`, with equality exactly at lags where the
/// overlapping segments coincide, so a true period peaks at 1 whatever the window.
pub fn autocorrelation<T: Real>(series: &[T], max_lag: usize) -> Vec<T> {
    let n = series.len();
    let mean = series.iter().fold(T::zero(), |a, &x| a + x) / T::from_count(n.max(1));
    let x: Vec<T> = series.iter().map(|&v| v - mean).collect();
    let max_lag = max_lag.min(n.saturating_sub(1));
    (0..=max_lag)
        .map(|k| {
            let (mut cross, mut energy) = (T::zero(), T::zero());
            for (&p, &q) in x[..n - k].iter().zip(&x[k..]) {
                cross += p * q;
                energy += p * p + q * q;
            }
            if energy > T::zero() {
                (cross + cross) / energy
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Peak search on [`autocorrelation`] with parabolic refinement. With a `guess`, lags are
/// restricted to `[0.5, 2] * guess`; otherwise the search starts at the first
/// zero crossing and extends to a third of the record.
pub fn detect_period<T: Real>(series: &[T], h: T, guess: Option<T>) -> Result<PeriodEstimate<T>> {
    let n = series.len();
    if n < 8 || !(h > T::zero()) {
        return Err(Error::InvalidInput("need at least 8 samples and h > 0".into()));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("series contains non-finite values".into()));
    }
    let (lo_v, hi_v) = series.iter().fold((series[0], series[0]), |(a, b), &x| (a.min(x), b.max(x)));
    if hi_v - lo_v <= T::lit(1e-12) * T::one().max(hi_v.abs()).max(lo_v.abs()) {
        return Err(Error::NoPeriodFound { confidence: 0.0 });
    }
    let (lo, hi) = match guess {
        Some(g) => {
            if !(g > T::zero()) {
                return Err(Error::InvalidInput("period guess must be positive".into()));
            }
            let span = h * T::from_count(n - 1);
            if span < T::lit(3.0) * g {
                return Err(Error::InvalidInput(format!(
                    "record of length {span} holds fewer than 3 periods of {g}"
                )));
            }
            let lo = (T::lit(0.5) * g / h).floor().to_usize().unwrap_or(1).max(1);
            let hi = (T::lit(2.0) * g / h).ceil().to_usize().unwrap_or(0);
            (lo, hi.min(n - 3))
        }
        None => (1, n / 3),
    };
    let r = autocorrelation(series, hi + 2);
    let lo = match guess {
        Some(_) => lo,
        None => match (lo..=hi).find(|&k| r[k] < T::zero()) {
            Some(k) => k,
            None => return Err(Error::NoPeriodFound { confidence: 0.0 }),
        },
    };
    let peaks: Vec<usize> = (lo.max(1)..=hi)
        .filter(|&k| k + 1 < r.len() && r[k] >= r[k - 1] && r[k] >= r[k + 1])
        .collect();
    let best = peaks.iter().map(|&k| r[k]).fold(T::neg_infinity(), T::max);
    if peaks.is_empty() || best < T::lit(MIN_CONFIDENCE) {
        let c = if best.is_finite() { best.max(T::zero()) } else { T::zero() };
        return Err(Error::NoPeriodFound { confidence: c.to_f64().unwrap_or(0.0) });
    }
    let k = *peaks
        .iter()
        .find(|&&k| r[k] >= T::lit(PEAK_FRACTION) * best)
        .expect("the tallest peak qualifies");
    let (ym, y0, yp) = (r[k - 1], r[k], r[k + 1]);
    let denom = ym - (y0 + y0) + yp;
    let shift = if denom < T::zero() { T::lit(0.5) * (ym - yp) / denom } else { T::zero() };
    let period = (T::from_count(k) + shift) * h;
    Ok(PeriodEstimate {
        period,
        confidence: y0.min(T::one()),
        predicted: guess,
        relative_error: guess.map(|g| ((period - g) / g).abs()),
    })
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
    let n = T::from_count(x.len());
    let mx = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| {
        let e = b - (intercept + slope * a);
        acc + e * e
    });
    (slope, intercept, (ss / n).sqrt())
}

/// Reduced coordinates of every sample, unwrapped to be continuous in time.
pub fn reduce_trajectory<T: Real>(traj: &Trajectory<T>) -> Result<Vec<(T, ReducedCoords<T>)>> {
    let mut tracker = ReducedTracker::new();
    traj.samples
        .iter()
        .map(|s| {
            let (a, b) = s.state.vectors()?;
            Ok((s.state.t, tracker.push(a, b)))
        })
        .collect()
}

/// Discrepancy statistics for one reduced coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateError<T> {
    /// Largest `min(|d|, 2pi - |d|)` between raw angles.
    pub max_wrapped: T,
    pub rms_wrapped: T,
    /// Largest plain distance between the unwrapped series.
    pub max_unwrapped: T,
    pub rms_unwrapped: T,
    pub time_of_max: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow<T> {
    pub t: T,
    pub numeric: ReducedCoords<T>,
    pub analytic: ReducedCoords<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticComparison<T> {
    pub chi: CoordinateError<T>,
    pub amp_a: CoordinateError<T>,
    pub xi: CoordinateError<T>,
    pub amp_b: CoordinateError<T>,
    pub theta: CoordinateError<T>,
    pub eta: CoordinateError<T>,
    pub rows: Vec<ComparisonRow<T>>,
}

impl<T: Real> AnalyticComparison<T> {
    /// Largest wrapped error over the four angles.
    pub fn max_angle_error(&self) -> T {
        [self.chi, self.xi, self.theta, self.eta]
            .iter()
            .fold(T::zero(), |m, e| m.max(e.max_wrapped))
    }

    pub fn named(&self) -> [(&'static str, CoordinateError<T>); 6] {
        [
            ("chi", self.chi),
            ("amp_a", self.amp_a),
            ("xi", self.xi),
            ("amp_b", self.amp_b),
            ("theta", self.theta),
            ("eta", self.eta),
        ]
    }
}

fn coordinate_error<T: Real>(rows: &[ComparisonRow<T>], pick: impl Fn(&ReducedCoords<T>) -> T, angle: bool) -> CoordinateError<T> {
    let z = T::zero();
    let mut out = CoordinateError { max_wrapped: z, rms_wrapped: z, max_unwrapped: z, rms_unwrapped: z, time_of_max: z };
    let (mut sw, mut su) = (T::zero(), T::zero());
    for row in rows {
        let (x, y) = (pick(&row.numeric), pick(&row.analytic));
        let plain = (x - y).abs();
        let wrapped = if angle { wrapped_distance(x, y) } else { plain };
        if wrapped > out.max_wrapped || wrapped.is_nan() {
            out.max_wrapped = wrapped;
            out.time_of_max = row.t;
        }
        out.max_unwrapped = out.max_unwrapped.max(plain);
        sw += wrapped * wrapped;
        su += plain * plain;
    }
    let n = T::from_count(rows.len().max(1));
    out.rms_wrapped = (sw / n).sqrt();
    out.rms_unwrapped = (su / n).sqrt();
    out
}

/// Evaluates the closed form at every sample time (relative to the first sample) and
/// reports per-coordinate errors against the reduced numeric trajectory.
pub fn compare_analytic_numeric<T: Real>(
    traj: &Trajectory<T>,
    sol: &AnalyticSolution<T>,
) -> Result<AnalyticComparison<T>> {
    let w = traj.params.axial_rate().ok_or_else(|| {
        Error::InvalidInput("comparison needs n = 3 and Omega+ = Omega- = w i".into())
    })?;
    let tol = T::lit(1e-12);
    if (w - sol.omega).abs() > tol * T::one().max(w.abs())
        || (traj.params.eps - sol.eps).abs() > tol * T::one().max(sol.eps.abs())
    {
        return Err(Error::InvalidInput("solution was fitted for different parameters".into()));
    }
    let reduced = reduce_trajectory(traj)?;
    let t0 = reduced[0].0;
    let rows = reduced
        .into_iter()
        .map(|(t, numeric)| Ok(ComparisonRow { t, numeric, analytic: analytic_coords(sol, t - t0)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyticComparison {
        chi: coordinate_error(&rows, |r| r.chi, true),
        amp_a: coordinate_error(&rows, |r| r.amp_a, false),
        xi: coordinate_error(&rows, |r| r.xi, true),
        amp_b: coordinate_error(&rows, |r| r.amp_b, false),
        theta: coordinate_error(&rows, |r| r.theta, true),
        eta: coordinate_error(&rows, |r| r.eta, true),
        rows,
    })
}
