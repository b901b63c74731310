//! The coupled Euler equations `dA/dt = [Omega+, A]_B`, `dB/dt = [Omega-, B]_A` as an
//! ODE on so(n) x so(n), integrated with fixed-step classical RK4.
//!
//! Two vector fields are available, selected by [`Coupling`]:
//!
//! * [`Coupling::Bracket`]: the deformed brackets themselves,
//!   `dA = [W+,A] + eps (W+ B^2 A - A B^2 W+)`, and symmetrically for `B`.
//! * [`Coupling::Components`]: the componentwise system on which the n = 3 closed-form
//!   solution is built, `dA = [W+,A] + (eps/2) <W+,[A,B]> B`,
//!   `dB = [W-,B] + (eps/2) <W-,[B,A]> A`. For n = 3 and `W = w i` this is
//!   `da_i = eps w b_i (b_j a_k - a_j b_k)` etc.
//!
//! The two agree at `eps = 0`. With `W+ = W- = W` both conserve `<A,A> + <B,B>`;
//! `<W,A>^2 + <W,B>^2` is conserved by `Components` in every dimension but by `Bracket`
//! only in so(3) or when `W^2` is a multiple of the identity. For n = 3, `Bracket` does
//! not conserve `sin(eta) sin(2 xi)`.

use crate::error::{check_dim, Error, Result};
use crate::liealg::{commutator, deformed_bracket_v1, deformed_bracket_v2, trace_pairing};
use crate::liealg::{SkewMatrix, Vector3};
use crate::reduced3;
use crate::scalar::Real;

/// Tolerance for deciding `Omega+ == Omega-` elementwise.
pub const SHARED_OMEGA_TOLERANCE: f64 = 1e-12;

/// Which right-hand side drives the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// The state-dependent deformed brackets applied directly.
    #[default]
    Bracket,
    /// The component equations the three-dimensional integration is carried out on.
    Components,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Coupling::Bracket => "bracket",
            Coupling::Components => "components",
        }
    }
}

impl std::str::FromStr for Coupling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bracket" => Ok(Coupling::Bracket),
            "components" => Ok(Coupling::Components),
            other => Err(Error::InvalidInput(format!(
                "unknown coupling '{other}' (expected 'bracket' or 'components')"
            ))),
        }
    }
}

/// Coupling constant and the two angular velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub eps: T,
    pub omega_plus: SkewMatrix<T>,
    pub omega_minus: SkewMatrix<T>,
    pub coupling: Coupling,
}

impl<T: Real> ModelParams<T> {
    pub fn new(eps: T, omega_plus: SkewMatrix<T>, omega_minus: SkewMatrix<T>) -> Result<Self> {
        check_dim(omega_plus.n(), omega_minus.n())?;
        if !eps.is_finite() || !omega_plus.is_finite() || !omega_minus.is_finite() {
            return Err(Error::InvalidInput("non-finite model parameter".into()));
        }
        Ok(Self { eps, omega_plus, omega_minus, coupling: Coupling::default() })
    }

    /// `Omega+ = Omega- = omega`.
    pub fn shared(eps: T, omega: SkewMatrix<T>) -> Result<Self> {
        Self::new(eps, omega.clone(), omega)
    }

    /// n = 3 with `Omega+ = Omega- = omega * i`.
    pub fn axial(eps: T, omega: T) -> Result<Self> {
        Self::shared(eps, SkewMatrix::hat(Vector3::i() * omega))
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn n(&self) -> usize {
        self.omega_plus.n()
    }

    /// The common angular velocity when `Omega+ == Omega-` within
    /// [`SHARED_OMEGA_TOLERANCE`].
    pub fn shared_omega(&self) -> Option<&SkewMatrix<T>> {
        self.omega_plus
            .approx_eq(&self.omega_minus, T::lit(SHARED_OMEGA_TOLERANCE))
            .then_some(&self.omega_plus)
    }

    /// `omega` when n = 3 and `Omega+ = Omega- = omega * i`.
    pub fn axial_rate(&self) -> Option<T> {
        let v = self.shared_omega()?.unhat().ok()?;
        let tol = T::lit(SHARED_OMEGA_TOLERANCE) * T::one().max(v.x.abs());
        (v.y.abs() <= tol && v.z.abs() <= tol).then_some(v.x)
    }
}

/// The pair of rotator states at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState<T> {
    pub t: T,
    pub a: SkewMatrix<T>,
    pub b: SkewMatrix<T>,
}

impl<T: Real> CoupledState<T> {
    pub fn new(t: T, a: SkewMatrix<T>, b: SkewMatrix<T>) -> Result<Self> {
        check_dim(a.n(), b.n())?;
        let s = Self { t, a, b };
        s.check_finite("initial state")?;
        Ok(s)
    }

    pub fn from_vectors(t: T, a: Vector3<T>, b: Vector3<T>) -> Result<Self> {
        Self::new(t, SkewMatrix::hat(a), SkewMatrix::hat(b))
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// `(a, b)` as vectors of R^3.
    pub fn vectors(&self) -> Result<(Vector3<T>, Vector3<T>)> {
        Ok((self.a.unhat()?, self.b.unhat()?))
    }

    fn check_finite(&self, what: &str) -> Result<()> {
        if self.t.is_finite() && self.a.is_finite() && self.b.is_finite() {
            Ok(())
        } else {
            Err(Error::Numeric { t: self.t.to_f64().unwrap_or(f64::NAN), what: what.into() })
        }
    }
}

/// Time derivatives `(dA/dt, dB/dt)`.
pub fn rhs<T: Real>(
    state: &CoupledState<T>,
    params: &ModelParams<T>,
) -> Result<(SkewMatrix<T>, SkewMatrix<T>)> {
    check_dim(params.n(), state.n())?;
    state.check_finite("right-hand side input")?;
    let ModelParams { eps, omega_plus: wp, omega_minus: wm, .. } = params;
    match params.coupling {
        Coupling::Bracket => Ok((
            deformed_bracket_v1(wp, &state.a, &state.b, *eps)?,
            deformed_bracket_v2(wm, &state.b, &state.a, *eps)?,
        )),
        Coupling::Components => {
            let half_eps = *eps * T::lit(0.5);
            let ab = commutator(&state.a, &state.b)?;
            let ba = ab.scale(-T::one());
            let da = commutator(wp, &state.a)?.axpy(half_eps * trace_pairing(wp, &ab)?, &state.b)?;
            let db = commutator(wm, &state.b)?.axpy(half_eps * trace_pairing(wm, &ba)?, &state.a)?;
            Ok((da, db))
        }
    }
}

fn offset<T: Real>(
    base: &CoupledState<T>,
    s: T,
    k: &(SkewMatrix<T>, SkewMatrix<T>),
) -> Result<CoupledState<T>> {
    Ok(CoupledState { t: base.t, a: base.a.axpy(s, &k.0)?, b: base.b.axpy(s, &k.1)? })
}

/// One RK4 step, plus the largest entry change made when re-projecting onto so(n).
fn rk4_step_projected<T: Real>(
    state: &CoupledState<T>,
    params: &ModelParams<T>,
    h: T,
) -> Result<(CoupledState<T>, T)> {
    if !(h.is_finite() && h != T::zero()) {
        return Err(Error::InvalidInput(format!("step size must be finite and nonzero, got {h}")));
    }
    let fail = |what: &str| Error::Numeric {
        t: state.t.to_f64().unwrap_or(f64::NAN),
        what: what.to_string(),
    };
    let half = h * T::lit(0.5);
    let k1 = rhs(state, params).map_err(|_| fail("stage 1"))?;
    let k2 = rhs(&offset(state, half, &k1)?, params).map_err(|_| fail("stage 2"))?;
    let k3 = rhs(&offset(state, half, &k2)?, params).map_err(|_| fail("stage 3"))?;
    let k4 = rhs(&offset(state, h, &k3)?, params).map_err(|_| fail("stage 4"))?;

    let sixth = h / T::lit(6.0);
    let third = h / T::lit(3.0);
    let combine = |x: &SkewMatrix<T>, s1: &SkewMatrix<T>, s2, s3, s4| -> Result<SkewMatrix<T>> {
        x.axpy(sixth, s1)?.axpy(third, s2)?.axpy(third, s3)?.axpy(sixth, s4)
    };
    let a = combine(&state.a, &k1.0, &k2.0, &k3.0, &k4.0)?;
    let b = combine(&state.b, &k1.1, &k2.1, &k3.1, &k4.1)?;
    let (a, ca) = SkewMatrix::antisymmetrize(a.dense());
    let (b, cb) = SkewMatrix::antisymmetrize(b.dense());
    let next = CoupledState { t: state.t + h, a, b };
    next.check_finite("rk4 update")?;
    Ok((next, ca.max(cb)))
}

/// Classical fourth-order Runge-Kutta step of `(A, B)` jointly; `t` advances by `h`.
pub fn rk4_step<T: Real>(
    state: &CoupledState<T>,
    params: &ModelParams<T>,
    h: T,
) -> Result<CoupledState<T>> {
    Ok(rk4_step_projected(state, params, h)?.0)
}

/// Two half steps, with the Richardson estimate `|full - halves|_max / 15` of their error.
pub fn rk4_step_doubling<T: Real>(
    state: &CoupledState<T>,
    params: &ModelParams<T>,
    h: T,
) -> Result<(CoupledState<T>, T)> {
    let full = rk4_step(state, params, h)?;
    let half = h * T::lit(0.5);
    let halves = rk4_step(&rk4_step(state, params, half)?, params, half)?;
    let err = full
        .a
        .checked_sub(&halves.a)?
        .max_abs()
        .max(full.b.checked_sub(&halves.b)?.max_abs());
    Ok((halves, err / T::lit(15.0)))
}

/// Conserved-quantity monitors for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport<T> {
    /// `<A,A> + <B,B>`.
    pub energy: T,
    /// `<W,A>^2 + <W,B>^2`, present only when `Omega+ = Omega-`.
    pub alignment: Option<T>,
    /// `sin(eta) sin(2 xi)`, present only for n = 3 with `Omega+ = Omega- = w i`.
    pub k_reduced: Option<T>,
}

pub fn invariants<T: Real>(state: &CoupledState<T>, params: &ModelParams<T>) -> InvariantReport<T> {
    let energy = trace_pairing(&state.a, &state.a).unwrap_or(T::nan())
        + trace_pairing(&state.b, &state.b).unwrap_or(T::nan());
    let alignment = params.shared_omega().and_then(|w| {
        let pa = trace_pairing(w, &state.a).ok()?;
        let pb = trace_pairing(w, &state.b).ok()?;
        Some(pa * pa + pb * pb)
    });
    let k_reduced = params.axial_rate().and_then(|_| {
        let (a, b) = state.vectors().ok()?;
        Some(reduced3::k_invariant(&reduced3::to_reduced(a, b)))
    });
    InvariantReport { energy, alignment, k_reduced }
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub state: CoupledState<T>,
    pub invariants: InvariantReport<T>,
}

/// A uniformly sampled RK4 run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<Sample<T>>,
    /// Integrator step.
    pub h: T,
    /// Number of integrator steps between recorded samples.
    pub sample_every: usize,
    pub params: ModelParams<T>,
    /// Largest entry change applied by the so(n) re-projection over the run.
    pub max_skew_correction: T,
}

impl<T: Real> Trajectory<T> {
    /// Spacing between consecutive samples.
    pub fn sample_spacing(&self) -> T {
        self.h * T::from_count(self.sample_every)
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.state.t).collect()
    }

    pub fn last(&self) -> &CoupledState<T> {
        &self.samples.last().expect("trajectories hold at least one sample").state
    }
}

/// Integrates from `state0.t` to `t_end` with `round((t_end - t0) / h)` steps of size `h`,
/// recording the initial state and every `sample_every`-th step. A negative `h`
/// integrates backwards in time.
pub fn integrate<T: Real>(
    state0: &CoupledState<T>,
    params: &ModelParams<T>,
    h: T,
    t_end: T,
    sample_every: usize,
) -> Result<Trajectory<T>> {
    check_dim(params.n(), state0.n())?;
    if sample_every == 0 {
        return Err(Error::InvalidInput("sample_every must be at least 1".into()));
    }
    if !(h.is_finite() && h != T::zero() && t_end.is_finite()) {
        return Err(Error::InvalidInput("step size and end time must be finite, h nonzero".into()));
    }
    let steps = ((t_end - state0.t) / h).round();
    if steps < T::zero() {
        return Err(Error::InvalidInput(format!(
            "t_end = {t_end} lies behind t0 = {} for step {h}",
            state0.t
        )));
    }
    let steps = steps.to_usize().ok_or_else(|| Error::InvalidInput("too many steps".into()))?;

    let t0 = state0.t;
    let mut samples = Vec::with_capacity(steps / sample_every + 1);
    samples.push(Sample { state: state0.clone(), invariants: invariants(state0, params) });
    let mut state = state0.clone();
    let mut max_corr = T::zero();
    for k in 1..=steps {
        let (mut next, corr) = rk4_step_projected(&state, params, h)?;
        next.t = t0 + T::from_count(k) * h;
        max_corr = max_corr.max(corr);
        if k % sample_every == 0 {
            samples.push(Sample { invariants: invariants(&next, params), state: next.clone() });
        }
        state = next;
    }
    Ok(Trajectory { samples, h, sample_every, params: params.clone(), max_skew_correction: max_corr })
}
