//! Angle/amplitude coordinates of the n = 3 pair with `Omega+ = Omega- = w i`, the
//! reduced equations of motion, and the closed-form solution of the component flow.
//!
//! With `a = a_i i + a_j j + a_k k` (likewise `b`):
//!
//! ```text
//! a_i = A cos chi,   b_i = A sin chi
//! a_j = a0 cos phi,  a_k = a0 sin phi,   b_j = b0 cos psi,  b_k = b0 sin psi
//! a0  = B cos xi,    b0  = B sin xi
//! theta = (phi + psi) / 2,   eta = phi - psi
//! ```
//!
//! Reduced rates, with every sign checked against finite differences of the matrix flow
//! (`s = eps w B^2`):
//!
//! | rate      | [`Coupling::Components`]     | [`Coupling::Bracket`]                                      |
//! |-----------|------------------------------|------------------------------------------------------------|
//! | `chi'`    | `-(s/2) sin 2xi sin eta`     | `+(s/2) sin 2xi sin eta`                                   |
//! | `xi'`     | `-(s/4) sin 2xi sin 2eta`    | `+(s/4) sin 2xi sin 2eta`                                  |
//! | `eta'`    | `s sin^2 eta cos 2xi`        | `eps w A^2 cos 2chi + s cos 2xi cos^2 eta`                 |
//! | `theta'`  | `w - (s/2) sin^2 eta`        | `w - eps w A^2 / 2 - (s/2) cos^2 eta`                      |
//!
//! `A` and `B` are constant under both. `K = sin eta sin 2xi` is conserved by the component
//! flow only. There, with `S = eps w B^2 K` and `R = sqrt(1 - K^2)`,
//!
//! ```text
//! cos 2xi = R cos(C1 + S t),   cot eta = -(R / K) sin(C1 + S t),   chi = -(S / 2) t + C3
//! theta   = w t - (eps w B^2 K^2 / 2) Int_0^t dt' / (1 - R^2 cos^2(C1 + S t')) + C2
//! ```
//!
//! The cotangent carries a minus sign relative to the phase advancing as `+S t`.

use crate::dynamics::{Coupling, ModelParams};
use crate::error::{Error, Result};
use crate::liealg::Vector3;
use crate::quadrature;
use crate::scalar::{unwrap_near, Real};

/// Largest `|K| - 1` accepted as roundoff before the fit rejects its input.
pub const K_CLAMP_TOLERANCE: f64 = 1e-12;

/// `|K|` at or below this is treated as the phase-locked family `K = 0`.
pub const K_DEGENERATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedCoords<T> {
    pub chi: T,
    pub amp_a: T,
    pub xi: T,
    pub amp_b: T,
    pub theta: T,
    pub eta: T,
}

impl<T: Real> ReducedCoords<T> {
    pub fn phi(&self) -> T {
        self.theta + self.eta * T::lit(0.5)
    }

    pub fn psi(&self) -> T {
        self.theta - self.eta * T::lit(0.5)
    }

    /// `a0 = B cos xi`.
    pub fn a0(&self) -> T {
        self.amp_b * self.xi.cos()
    }

    /// `b0 = B sin xi`.
    pub fn b0(&self) -> T {
        self.amp_b * self.xi.sin()
    }

    /// Fields in declaration order: chi, amp_a, xi, amp_b, theta, eta.
    pub fn to_array(&self) -> [T; 6] {
        [self.chi, self.amp_a, self.xi, self.amp_b, self.theta, self.eta]
    }
}

/// Polar decomposition of a vector pair. Zero amplitudes give angle 0.
pub fn to_reduced<T: Real>(a: Vector3<T>, b: Vector3<T>) -> ReducedCoords<T> {
    let polar = |x: T, y: T| {
        let r = x.hypot(y);
        let ang = if r == T::zero() { T::zero() } else { y.atan2(x) };
        (r, ang)
    };
    let (amp_a, chi) = polar(a.x, b.x);
    let (a0, phi) = polar(a.y, a.z);
    let (b0, psi) = polar(b.y, b.z);
    let (amp_b, xi) = polar(a0, b0);
    ReducedCoords { chi, amp_a, xi, amp_b, theta: (phi + psi) * T::lit(0.5), eta: phi - psi }
}

pub fn from_reduced<T: Real>(rc: &ReducedCoords<T>) -> (Vector3<T>, Vector3<T>) {
    let (a0, b0) = (rc.a0(), rc.b0());
    let (phi, psi) = (rc.phi(), rc.psi());
    let a = Vector3::new(rc.amp_a * rc.chi.cos(), a0 * phi.cos(), a0 * phi.sin());
    let b = Vector3::new(rc.amp_a * rc.chi.sin(), b0 * psi.cos(), b0 * psi.sin());
    (a, b)
}

/// `K = sin(eta) sin(2 xi)`.
pub fn k_invariant<T: Real>(rc: &ReducedCoords<T>) -> T {
    rc.eta.sin() * (rc.xi + rc.xi).sin()
}

/// Reduces successive samples of a continuous trajectory, keeping `chi`, `phi`, `psi`
/// (and so `theta`, `eta`) continuous across the `atan2` branch cut.
#[derive(Debug, Clone, Default)]
pub struct ReducedTracker<T> {
    last: Option<(T, T, T)>,
}

impl<T: Real> ReducedTracker<T> {
    pub fn new() -> Self {
        Self { last: None }
    }

    pub fn push(&mut self, a: Vector3<T>, b: Vector3<T>) -> ReducedCoords<T> {
        let raw = to_reduced(a, b);
        let (mut chi, mut phi, mut psi) = (raw.chi, raw.phi(), raw.psi());
        if let Some((c0, p0, q0)) = self.last {
            chi = unwrap_near(chi, c0);
            phi = unwrap_near(phi, p0);
            psi = unwrap_near(psi, q0);
        }
        self.last = Some((chi, phi, psi));
        ReducedCoords {
            chi,
            theta: (phi + psi) * T::lit(0.5),
            eta: phi - psi,
            ..raw
        }
    }
}

fn axial_rate<T: Real>(params: &ModelParams<T>) -> Result<T> {
    if params.n() != 3 {
        return Err(Error::InvalidInput(format!("reduction needs n = 3, got {}", params.n())));
    }
    params
        .axial_rate()
        .ok_or_else(|| Error::InvalidInput("reduction needs Omega+ = Omega- = w i".into()))
}

/// Time derivatives of the reduced coordinates under `params.coupling`.
pub fn reduced_rhs<T: Real>(rc: &ReducedCoords<T>, params: &ModelParams<T>) -> Result<ReducedCoords<T>> {
    let w = axial_rate(params)?;
    let scale = T::one().max(rc.amp_a).max(rc.amp_b);
    let floor = T::lit(1e-12) * scale;
    if rc.amp_a <= floor || rc.a0() <= floor || rc.b0() <= floor {
        return Err(Error::DegenerateInvariant(
            "a zero amplitude leaves a reduced angle undefined".into(),
        ));
    }
    let ew = params.eps * w;
    let s = ew * rc.amp_b * rc.amp_b;
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let two = T::lit(2.0);
    let (sin2xi, cos2xi) = (two * rc.xi).sin_cos();
    let (sin_eta, cos_eta) = rc.eta.sin_cos();
    let sin2eta = (two * rc.eta).sin();
    let zero = T::zero();
    let rates = match params.coupling {
        Coupling::Components => ReducedCoords {
            chi: -s * half * sin2xi * sin_eta,
            amp_a: zero,
            xi: -s * quarter * sin2xi * sin2eta,
            amp_b: zero,
            theta: w - s * half * sin_eta * sin_eta,
            eta: s * sin_eta * sin_eta * cos2xi,
        },
        Coupling::Bracket => {
            let a2 = rc.amp_a * rc.amp_a;
            ReducedCoords {
                chi: s * half * sin2xi * sin_eta,
                amp_a: zero,
                xi: s * quarter * sin2xi * sin2eta,
                amp_b: zero,
                theta: w - ew * a2 * half - s * half * cos_eta * cos_eta,
                eta: ew * a2 * (two * rc.chi).cos() + s * cos2xi * cos_eta * cos_eta,
            }
        }
    };
    Ok(rates)
}

/// Fitted constants of the closed-form component-flow solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSolution<T> {
    /// `K = sin(eta) sin(2 xi)`, `|K| <= 1`.
    pub k: T,
    /// Phase of the slow oscillation at `t = 0`.
    pub c1: T,
    /// `theta(0)`.
    pub c2: T,
    /// `chi(0)`.
    pub c3: T,
    pub eps: T,
    pub omega: T,
    /// `B^2 = a0^2 + b0^2`.
    pub b2: T,
    /// `A^2 = a_i^2 + b_i^2`.
    pub a2: T,
    /// Mean rate of `theta`.
    pub omega_prime: T,
    /// `(omega' - omega) / (eps w B^2 K)`.
    pub delta: T,
    /// Mean over a period of `1 / (1 - (1 - K^2) cos^2 u)`.
    pub mean_weight: T,
    /// Multiple of `2 pi` placing the closed-form `eta` on the branch of `eta(0)`.
    pub eta_branch: T,
}

const QUAD_TOL: f64 = 1e-13;

fn weight<T: Real>(k: T, u: T) -> T {
    let c = u.cos();
    T::one() / (T::one() - (T::one() - k * k) * c * c)
}

fn mean_weight<T: Real>(k: T) -> Result<T> {
    if k.abs() <= T::lit(K_DEGENERATE_TOLERANCE) {
        return Err(Error::DegenerateInvariant("K = 0: phase-locked family".into()));
    }
    let tol = T::lit(QUAD_TOL);
    Ok(quadrature::integrate(|u| weight(k, u), T::zero(), T::TAU(), tol, tol)? / T::TAU())
}

/// `(omega', Delta)` from the period average of `d theta / dt`:
/// `omega' = w - (eps w B^2 K^2 / 2) <1 / (1 - (1 - K^2) cos^2 u)>` and
/// `Delta = (omega' - w) / (eps w B^2 K) = -K <...> / 2`.
pub fn analytic_mean_frequency<T: Real>(sol: &AnalyticSolution<T>) -> Result<(T, T)> {
    let m = mean_weight(sol.k)?;
    let half = T::lit(0.5);
    let omega_prime = sol.omega - sol.eps * sol.omega * sol.b2 * sol.k * sol.k * half * m;
    Ok((omega_prime, -sol.k * m * half))
}

/// Fits `K, C1, C2, C3` (and `omega'`, `Delta`) to the state `rc0` at `t = 0`.
pub fn fit_constants<T: Real>(rc0: &ReducedCoords<T>, params: &ModelParams<T>) -> Result<AnalyticSolution<T>> {
    let omega = axial_rate(params)?;
    let mut k = k_invariant(rc0);
    let excess = k.abs() - T::one();
    if excess > T::lit(K_CLAMP_TOLERANCE) {
        return Err(Error::InvalidInput(format!("|K| = {} exceeds 1", k.abs())));
    }
    if excess > T::zero() {
        k = k.signum();
    }
    if k.abs() <= T::lit(K_DEGENERATE_TOLERANCE) {
        return Err(Error::DegenerateInvariant(
            "K = 0 (phase-locked family); use numeric integration".into(),
        ));
    }
    let two = T::lit(2.0);
    let (sin2xi, cos2xi) = (two * rc0.xi).sin_cos();
    let (sin_part, cos_part) = (-(sin2xi * rc0.eta.cos()), cos2xi);
    // |K| = 1 leaves no oscillation and C1 is arbitrary: take 0
    let c1 = if sin_part.hypot(cos_part) <= T::lit(K_CLAMP_TOLERANCE) {
        T::zero()
    } else {
        sin_part.atan2(cos_part)
    };
    let mut sol = AnalyticSolution {
        k,
        c1,
        c2: rc0.theta,
        c3: rc0.chi,
        eps: params.eps,
        omega,
        b2: rc0.amp_b * rc0.amp_b,
        a2: rc0.amp_a * rc0.amp_a,
        omega_prime: T::nan(),
        delta: T::nan(),
        mean_weight: T::nan(),
        eta_branch: T::zero(),
    };
    sol.mean_weight = mean_weight(k)?;
    let (omega_prime, delta) = analytic_mean_frequency(&sol)?;
    sol.omega_prime = omega_prime;
    sol.delta = delta;
    let eta_principal = analytic_eta(&sol, T::zero());
    sol.eta_branch = T::TAU() * ((rc0.eta - eta_principal) / T::TAU()).round();
    Ok(sol)
}

impl<T: Real> AnalyticSolution<T> {
    /// Slow phase rate `eps w B^2 K`.
    pub fn slow_rate(&self) -> T {
        self.eps * self.omega * self.b2 * self.k
    }

    pub fn phase(&self, t: T) -> T {
        self.c1 + self.slow_rate() * t
    }

    /// `sqrt(1 - K^2)`.
    pub fn amplitude(&self) -> T {
        (T::one() - self.k * self.k).max(T::zero()).sqrt()
    }
}

/// `xi(t) = arccos(sqrt(1 - K^2) cos(C1 + S t)) / 2`; `xi` lives in `[0, pi/2]` so the
/// principal branch is the continuous one.
pub fn analytic_xi<T: Real>(sol: &AnalyticSolution<T>, t: T) -> T {
    let c = (sol.amplitude() * sol.phase(t).cos()).max(-T::one()).min(T::one());
    c.acos() * T::lit(0.5)
}

/// `eta(t)` from `cot eta = -(R/K) sin(C1 + S t)` and `sin eta = K / sin 2xi`. `sin eta`
/// keeps the sign of `K`, so `eta` never crosses a multiple of `pi`.
pub fn analytic_eta<T: Real>(sol: &AnalyticSolution<T>, t: T) -> T {
    sol.k.atan2(-sol.amplitude() * sol.phase(t).sin()) + sol.eta_branch
}

/// `chi(t) = -(S/2) t + C3`.
pub fn analytic_chi<T: Real>(sol: &AnalyticSolution<T>, t: T) -> T {
    sol.c3 - sol.slow_rate() * t * T::lit(0.5)
}

/// `theta(t)`, with the integral taken period by period: whole periods of the integrand
/// (length `pi` in phase) contribute `pi <weight>` each and the remainder is integrated
/// adaptively.
pub fn analytic_theta<T: Real>(sol: &AnalyticSolution<T>, t: T) -> Result<T> {
    let s = sol.slow_rate();
    let drift = sol.omega * t + sol.c2;
    if s == T::zero() {
        // constant integrand
        let coef = sol.eps * sol.omega * sol.b2 * sol.k * sol.k * T::lit(0.5);
        return Ok(drift - coef * t * weight(sol.k, sol.c1));
    }
    let span = s * t;
    let whole = (span / T::PI()).trunc();
    let start = sol.c1 + whole * T::PI();
    let tol = T::lit(QUAD_TOL);
    let rest = quadrature::integrate(|u| weight(sol.k, u), start, sol.c1 + span, tol, tol)?;
    let phase_integral = whole * T::PI() * sol.mean_weight + rest;
    // (eps w B^2 K^2 / 2) / S = K / 2
    Ok(drift - sol.k * T::lit(0.5) * phase_integral)
}

/// All six reduced coordinates at time `t`.
pub fn analytic_coords<T: Real>(sol: &AnalyticSolution<T>, t: T) -> Result<ReducedCoords<T>> {
    Ok(ReducedCoords {
        chi: analytic_chi(sol, t),
        amp_a: sol.a2.sqrt(),
        xi: analytic_xi(sol, t),
        amp_b: sol.b2.sqrt(),
        theta: analytic_theta(sol, t)?,
        eta: analytic_eta(sol, t),
    })
}

/// The two almost-periods, plus the period of the closed-form slow phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodPair<T> {
    /// `2 pi / omega'`.
    pub t_fast: T,
    /// `4 pi / (eps w B^2 K)`: the period of `chi`, as the almost-period pair states it.
    pub t_slow: T,
    /// `2 pi / (eps w B^2 K)`: the period of `cos 2xi`, `cot eta` and so of `(xi, eta)`.
    pub t_phase: T,
}

pub fn periods<T: Real>(sol: &AnalyticSolution<T>) -> Result<PeriodPair<T>> {
    let s = sol.slow_rate().abs();
    if s == T::zero() || !s.is_finite() {
        return Err(Error::DegenerateInvariant("eps w B^2 K = 0: no slow period".into()));
    }
    if sol.omega_prime == T::zero() || !sol.omega_prime.is_finite() {
        return Err(Error::DegenerateInvariant("omega' = 0: no fast period".into()));
    }
    let tau = T::TAU();
    Ok(PeriodPair { t_fast: tau / sol.omega_prime.abs(), t_slow: (tau + tau) / s, t_phase: tau / s })
}
