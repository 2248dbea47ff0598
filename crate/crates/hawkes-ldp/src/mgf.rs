//! The four moment-generating-function ODEs of the Hawkes process, their
//! sensitivity flows, finite-time blow-up detection, and the explosion
//! boundaries in the initial condition.
//!
//! Conditioned on `Z_0 = z`,
//!
//! ```text
//! E[e^{θ Z_t} | Z_0 = z] = exp(A(t;θ) z + B(t;θ))
//! E[e^{θ N_t} | Z_0 = z] = exp((C(t;θ/α) - θ/α) z + D(t;θ/α))
//! ```
//!
//! where
//!
//! ```text
//! A' = -βA + e^{αA} - 1,            A(0) = θ
//! B' = μ (e^{αA} - 1),              B(0) = 0
//! C' = -βC + e^{αC} - 1 + βθ/α,     C(0) = θ/α
//! D' = μ (e^{αC} - 1),              D(0) = 0
//! ```
//!
//! The `A` and `C` flows explode in finite time once `θ` crosses a positive
//! boundary `θ_c(T)` resp. `θ_d(T)`; both boundaries are located here by
//! bisection on the survive-to-`T` predicate. Sensitivities in the initial
//! condition,
//!
//! ```text
//! γ' = (-β + α e^{αA}) γ,               γ(0) = 1      (γ(T) = ∂A(T;θ)/∂θ)
//! r' = (-β + α e^{αC}) r + e^{αC},      r(0) = 0      (r(T) = ∂[C(T;θ/α) - θ/α]/∂θ)
//! ```
//!
//! are integrated as augmented systems on the same step sequence as their
//! base flows so the discretization error stays consistent.

use crate::error::{Error, Result};
use crate::params::HawkesParams;
use crate::solver::{integrate, integrate_capped, OdeSolution};

/// Default local-error tolerance used when no override is supplied.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Blow-up cap for the `A`/`C` components. Beyond `(50 + |ln α|)/α` the
/// exponential term dwarfs the rest of the field and the residual time to
/// infinity is below 1e-20, so crossing the cap is declared blow-up.
pub fn blowup_cap(alpha: f64) -> f64 {
    (50.0 + alpha.ln().abs()) / alpha
}

/// A log-MGF value that may sit past the explosion boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MgfValue {
    Finite(f64),
    Infinite,
}

impl MgfValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            MgfValue::Finite(v) => Some(v),
            MgfValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, MgfValue::Infinite)
    }
}

/// A solved initial-value problem on `[0, T]` (or up to blow-up): the
/// accepted-step grid, the solution samples, and slopes for cubic-Hermite
/// dense evaluation between steps.
#[derive(Debug, Clone)]
pub struct OdeCurve {
    theta0: f64,
    grid: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    blown_up: bool,
    blowup_time: Option<f64>,
}

impl OdeCurve {
    fn from_component<const N: usize>(theta0: f64, sol: &OdeSolution<N>, comp: usize) -> Self {
        OdeCurve {
            theta0,
            grid: sol.t.clone(),
            values: sol.y.iter().map(|y| y[comp]).collect(),
            derivs: sol.dy.iter().map(|dy| dy[comp]).collect(),
            blown_up: sol.blown_up,
            blowup_time: sol.blowup_time,
        }
    }

    /// Initial-condition parameter θ this curve was started from.
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn blown_up(&self) -> bool {
        self.blown_up
    }

    pub fn blowup_time(&self) -> Option<f64> {
        self.blowup_time
    }

    /// Value at the last stored node (`T`, or the blow-up time).
    pub fn end_value(&self) -> f64 {
        *self.values.last().expect("curve has at least one node")
    }

    pub fn end_time(&self) -> f64 {
        *self.grid.last().expect("curve has at least one node")
    }

    /// Dense evaluation by cubic Hermite interpolation between accepted
    /// steps; `t` is clamped to the stored range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.grid.len();
        if n == 1 || t <= self.grid[0] {
            return self.values[0];
        }
        if t >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let seg = match self.grid.partition_point(|&tk| tk <= t) {
            0 => 0,
            k => k - 1,
        };
        let (t0, t1) = (self.grid[seg], self.grid[seg + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.values[seg]
            + (s3 - 2.0 * s2 + s) * h * self.derivs[seg]
            + (-2.0 * s3 + 3.0 * s2) * self.values[seg + 1]
            + (s3 - s2) * h * self.derivs[seg + 1]
    }

    /// CSV dump with header `t,value`.
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| vec![crate::csv::fmt_f64(t), crate::csv::fmt_f64(v)])
            .collect();
        crate::csv::table("t,value", &rows)
    }
}

fn a_field(alpha: f64, beta: f64) -> impl Fn(f64, &[f64; 1]) -> [f64; 1] {
    move |_, y| [-beta * y[0] + (alpha * y[0]).exp() - 1.0]
}

fn c_field(alpha: f64, beta: f64, theta: f64) -> impl Fn(f64, &[f64; 1]) -> [f64; 1] {
    let shift = beta * theta / alpha;
    move |_, y| [-beta * y[0] + (alpha * y[0]).exp() - 1.0 + shift]
}

/// Solves the `A` flow from `A(0) = θ` on `[0, t_end]`. Blow-up is a result,
/// not an error.
pub fn solve_a(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> OdeCurve {
    let (alpha, beta) = (params.alpha(), params.beta());
    let sol = integrate(a_field(alpha, beta), [theta], t_end, tol, blowup_cap(alpha));
    OdeCurve::from_component(theta, &sol, 0)
}

/// Solves the `B` flow alongside `A` (same step sequence); propagates the
/// blow-up of `A`.
pub fn solve_b(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> OdeCurve {
    let (alpha, beta, mu) = (params.alpha(), params.beta(), params.mu());
    let f = move |_: f64, y: &[f64; 2]| {
        let ea = (alpha * y[0]).exp();
        [-beta * y[0] + ea - 1.0, mu * (ea - 1.0)]
    };
    let sol = integrate(f, [theta, 0.0], t_end, tol, blowup_cap(alpha));
    OdeCurve::from_component(theta, &sol, 1)
}

/// Solves the `C` flow from `C(0) = θ/α` on `[0, t_end]`.
pub fn solve_c(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> OdeCurve {
    let (alpha, beta) = (params.alpha(), params.beta());
    let sol = integrate(
        c_field(alpha, beta, theta),
        [theta / alpha],
        t_end,
        tol,
        blowup_cap(alpha),
    );
    OdeCurve::from_component(theta, &sol, 0)
}

/// Solves the `D` flow alongside `C`; propagates the blow-up of `C`.
pub fn solve_d(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> OdeCurve {
    let (alpha, beta, mu) = (params.alpha(), params.beta(), params.mu());
    let shift = beta * theta / alpha;
    let f = move |_: f64, y: &[f64; 2]| {
        let ec = (alpha * y[0]).exp();
        [-beta * y[0] + ec - 1.0 + shift, mu * (ec - 1.0)]
    };
    let sol = integrate(f, [theta / alpha, 0.0], t_end, tol, blowup_cap(alpha));
    OdeCurve::from_component(theta, &sol, 1)
}

/// `(A, γ, ∂γ/∂θ)` integrated together; used by the Legendre solvers.
pub(crate) fn flow_a_sens(
    params: &HawkesParams,
    theta: f64,
    t_end: f64,
    tol: f64,
) -> OdeSolution<3> {
    let (alpha, beta) = (params.alpha(), params.beta());
    let f = move |_: f64, y: &[f64; 3]| {
        let ea = (alpha * y[0]).exp();
        let lin = -beta + alpha * ea;
        [
            -beta * y[0] + ea - 1.0,
            lin * y[1],
            lin * y[2] + alpha * alpha * ea * y[1] * y[1],
        ]
    };
    integrate(f, [theta, 1.0, 0.0], t_end, tol, blowup_cap(alpha))
}

/// `(C, r, ∂r/∂θ)` integrated together.
pub(crate) fn flow_c_sens(
    params: &HawkesParams,
    theta: f64,
    t_end: f64,
    tol: f64,
) -> OdeSolution<3> {
    let (alpha, beta) = (params.alpha(), params.beta());
    let shift = beta * theta / alpha;
    let f = move |_: f64, y: &[f64; 3]| {
        let ec = (alpha * y[0]).exp();
        let lin = -beta + alpha * ec;
        let one_ar = 1.0 + alpha * y[1];
        [
            -beta * y[0] + ec - 1.0 + shift,
            lin * y[1] + ec,
            lin * y[2] + ec * one_ar * one_ar,
        ]
    };
    integrate(f, [theta / alpha, 0.0, 0.0], t_end, tol, blowup_cap(alpha))
}

/// Raw `A` flow solution for the most-likely `Z` path. Steps are capped at
/// `T/256` so the Hermite dense output the path quadrature reads stays at
/// the accuracy of the solve.
pub(crate) fn flow_a(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> OdeSolution<1> {
    let (alpha, beta) = (params.alpha(), params.beta());
    integrate_capped(
        a_field(alpha, beta),
        [theta],
        t_end,
        tol,
        blowup_cap(alpha),
        t_end / 256.0,
    )
}

/// Raw `C` flow solution for the most-likely `N` path; same step cap as
/// [`flow_a`].
pub(crate) fn flow_c(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> OdeSolution<1> {
    let (alpha, beta) = (params.alpha(), params.beta());
    integrate_capped(
        c_field(alpha, beta, theta),
        [theta / alpha],
        t_end,
        tol,
        blowup_cap(alpha),
        t_end / 256.0,
    )
}

/// `γ(T) = ∂A(T;θ)/∂θ > 0`, integrated alongside `A`. Fails if `A` blows up
/// before `T`.
pub fn sensitivity_gamma(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> Result<f64> {
    let sol = flow_a_sens(params, theta, t_end, tol);
    if sol.blown_up {
        return Err(Error::BlowUp {
            at: sol.blowup_time.unwrap_or(0.0),
            horizon: t_end,
        });
    }
    Ok(sol.end_state()[1])
}

/// `r(T) = ∂/∂θ [C(T;θ/α) - θ/α]`, integrated alongside `C`.
pub fn sensitivity_r(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> Result<f64> {
    let sol = flow_c_sens(params, theta, t_end, tol);
    if sol.blown_up {
        return Err(Error::BlowUp {
            at: sol.blowup_time.unwrap_or(0.0),
            horizon: t_end,
        });
    }
    Ok(sol.end_state()[1])
}

/// Which flow an explosion boundary refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// `θ_c(T)`: largest initial value for which the `A` flow survives.
    ThetaC,
    /// `θ_d(T)`: same for the `C` flow.
    ThetaD,
}

/// The critical initial value separating flows that survive to `T` from
/// flows that blow up earlier, bracketed to width <= 1e-9 and re-verified on
/// construction: the flow survives at `theta - bracket_width` and blows up at
/// `theta + bracket_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplosionBoundary {
    kind: BoundaryKind,
    theta: f64,
    horizon: f64,
    bracket_width: f64,
}

impl ExplosionBoundary {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn bracket_width(&self) -> f64 {
        self.bracket_width
    }

    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }
}

const BOUNDARY_WIDTH: f64 = 1e-9;

fn a_survives(params: &HawkesParams, theta: f64, t_end: f64) -> bool {
    !solve_a(params, theta, t_end, DEFAULT_TOL).blown_up()
}

fn c_survives(params: &HawkesParams, theta: f64, t_end: f64) -> bool {
    !solve_c(params, theta, t_end, DEFAULT_TOL).blown_up()
}

fn locate_boundary<F>(survives: F, horizon: f64, kind: BoundaryKind) -> ExplosionBoundary
where
    F: Fn(f64) -> bool,
{
    // The boundary is strictly positive: theta = 0 is a fixed point of both
    // flows. Grow the upper end until the flow dies, then bisect.
    debug_assert!(survives(0.0));
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut guard = 0;
    while survives(hi) {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        assert!(guard < 200, "explosion boundary ran away");
    }
    while hi - lo > BOUNDARY_WIDTH {
        let mid = 0.5 * (lo + hi);
        if survives(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let width = hi - lo;
    let theta = 0.5 * (lo + hi);
    // Invariant re-verification: survive strictly below, blow up strictly
    // above.
    assert!(survives(theta - width), "boundary invariant (below) failed");
    assert!(!survives(theta + width), "boundary invariant (above) failed");
    ExplosionBoundary {
        kind,
        theta,
        horizon,
        bracket_width: width,
    }
}

/// Locates `θ_c(T)` by bisection on "does the `A` flow survive to `T`".
pub fn find_theta_c(params: &HawkesParams, t_end: f64) -> ExplosionBoundary {
    locate_boundary(
        |theta| a_survives(params, theta, t_end),
        t_end,
        BoundaryKind::ThetaC,
    )
}

/// Locates `θ_d(T)` by bisection on "does the `C` flow survive to `T`".
/// All θ below the boundary are treated as finite by the same criterion.
pub fn find_theta_d(params: &HawkesParams, t_end: f64) -> ExplosionBoundary {
    locate_boundary(
        |theta| c_survives(params, theta, t_end),
        t_end,
        BoundaryKind::ThetaD,
    )
}

/// `log E[e^{θ Z_T} | Z_0 = z0] = A(T;θ) z0 + B(T;θ)`, or the explicit
/// infinite-MGF result past the boundary.
pub fn log_mgf_z(params: &HawkesParams, z0: f64, theta: f64, t_end: f64) -> MgfValue {
    let (alpha, beta, mu) = (params.alpha(), params.beta(), params.mu());
    let f = move |_: f64, y: &[f64; 2]| {
        let ea = (alpha * y[0]).exp();
        [-beta * y[0] + ea - 1.0, mu * (ea - 1.0)]
    };
    let sol = integrate(f, [theta, 0.0], t_end, DEFAULT_TOL, blowup_cap(alpha));
    if sol.blown_up {
        MgfValue::Infinite
    } else {
        let end = sol.end_state();
        MgfValue::Finite(end[0] * z0 + end[1])
    }
}

/// `log E[e^{θ N_T} | Z_0 = z0] = (C(T;θ/α) - θ/α) z0 + D(T;θ/α)`.
pub fn log_mgf_n(params: &HawkesParams, z0: f64, theta: f64, t_end: f64) -> MgfValue {
    let (alpha, beta, mu) = (params.alpha(), params.beta(), params.mu());
    let shift = beta * theta / alpha;
    let f = move |_: f64, y: &[f64; 2]| {
        let ec = (alpha * y[0]).exp();
        [-beta * y[0] + ec - 1.0 + shift, mu * (ec - 1.0)]
    };
    let sol = integrate(
        f,
        [theta / alpha, 0.0],
        t_end,
        DEFAULT_TOL,
        blowup_cap(alpha),
    );
    if sol.blown_up {
        MgfValue::Infinite
    } else {
        let end = sol.end_state();
        MgfValue::Finite((end[0] - theta / alpha) * z0 + end[1])
    }
}
