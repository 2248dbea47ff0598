//! The two worked applications of the rate functions: the finite-horizon
//! insurance ruin exponent under Hawkes claim arrivals, and the
//! queue-length-maximum (loss) exponent of an infinite-server queue fed by a
//! Hawkes process with a large initial intensity.

use crate::error::{Error, Result};
use crate::opt::{golden_min, golden_min_positive};
use crate::params::HawkesParams;
use crate::rate::{rate_h, rate_j};
use crate::sim;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

/// Claim-size distribution: its log-MGF, the supremum `θ⁺` of the finite-MGF
/// domain, and the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClaimKind {
    Poisson { rate: f64 },
    Deterministic { size: f64 },
    Exponential { mean: f64 },
}

/// A claim-size model. `log E[e^{θY}]` is finite for `θ < theta_plus` and
/// declared infinite at and above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimModel {
    kind: ClaimKind,
    theta_plus: f64,
    mean: f64,
}

impl ClaimModel {
    pub fn poisson(rate: f64) -> Result<Self> {
        require_positive("claim rate", rate)?;
        Ok(ClaimModel {
            kind: ClaimKind::Poisson { rate },
            theta_plus: f64::INFINITY,
            mean: rate,
        })
    }

    pub fn deterministic(size: f64) -> Result<Self> {
        require_positive("claim size", size)?;
        Ok(ClaimModel {
            kind: ClaimKind::Deterministic { size },
            theta_plus: f64::INFINITY,
            mean: size,
        })
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        require_positive("claim mean", mean)?;
        Ok(ClaimModel {
            kind: ClaimKind::Exponential { mean },
            theta_plus: 1.0 / mean,
            mean,
        })
    }

    pub fn kind(&self) -> ClaimKind {
        self.kind
    }

    pub fn theta_plus(&self) -> f64 {
        self.theta_plus
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `log E[e^{θ Y}]`, `+∞` at and above `θ⁺`.
    pub fn log_mgf(&self, theta: f64) -> f64 {
        if theta >= self.theta_plus {
            return f64::INFINITY;
        }
        match self.kind {
            ClaimKind::Poisson { rate } => rate * theta.exp_m1(),
            ClaimKind::Deterministic { size } => theta * size,
            ClaimKind::Exponential { mean } => -(-mean * theta).ln_1p(),
        }
    }

    /// The convex conjugate `Λ̄(v) = sup_θ {θv - log E[e^{θY}]}` in closed
    /// form per kind.
    pub fn conjugate(&self, v: f64) -> f64 {
        if v < 0.0 {
            return f64::INFINITY;
        }
        match self.kind {
            ClaimKind::Poisson { rate } => {
                if v == 0.0 {
                    rate
                } else {
                    v * (v / rate).ln() - v + rate
                }
            }
            ClaimKind::Deterministic { size } => {
                if (v - size).abs() <= 1e-12 * size {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ClaimKind::Exponential { mean } => {
                if v == 0.0 {
                    f64::INFINITY
                } else {
                    v / mean - 1.0 - (v / mean).ln()
                }
            }
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.kind {
            ClaimKind::Poisson { rate } => {
                Poisson::new(rate).expect("validated rate").sample(rng)
            }
            ClaimKind::Deterministic { size } => size,
            ClaimKind::Exponential { mean } => {
                let u: f64 = rng.random();
                -mean * (1.0 - u).ln()
            }
        }
    }
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "claim parameter",
            value: v,
            requirement: name,
        });
    }
    Ok(())
}

/// Scaled ruin problem: initial surplus `n·x`, horizon `T`, claim model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinSpec {
    x: f64,
    horizon: f64,
    claims: ClaimModel,
}

impl RuinSpec {
    pub fn new(x: f64, horizon: f64, claims: ClaimModel) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "x",
                value: x,
                requirement: "finite and > 0",
            });
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "T",
                value: horizon,
                requirement: "finite and > 0",
            });
        }
        Ok(RuinSpec { x, horizon, claims })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn claims(&self) -> &ClaimModel {
        &self.claims
    }
}

/// Law-of-large-numbers ruin time: the deterministic time at which the fluid
/// claims total `E[Y₁] ψ(t)` exhausts the scaled surplus `x`:
///
/// ```text
/// τ∞ = log((α-β) x/E[Y₁] + 1) / (α-β)   (α ≠ β),    x/E[Y₁]   (α = β)
/// ```
///
/// Infinite when `(α-β) x/E[Y₁] + 1 <= 0` (the fluid path never ruins).
pub fn lln_ruin_time(params: &HawkesParams, claims: &ClaimModel, x: f64) -> f64 {
    let w = params.alpha() - params.beta();
    let scaled = x / claims.mean();
    if w == 0.0 {
        return scaled;
    }
    let arg = w * scaled + 1.0;
    if arg <= 0.0 {
        return f64::INFINITY;
    }
    arg.ln() / w
}

/// Result of the ruin-exponent optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinExponent {
    /// `I_τ(x;T)`; zero in the LLN-ruin regime.
    pub value: f64,
    /// True when `T >= τ∞`, where ruin is no longer a rare event.
    pub lln_regime: bool,
    /// Optimizing scaled claim count `y = h(T)`.
    pub y_star: Option<f64>,
    /// Optimizing singular mass `z` (only when `θ⁺ < ∞`).
    pub z_star: Option<f64>,
}

/// Finite-horizon ruin exponent
///
/// ```text
/// I_τ(x;T) = inf_{y>0, 0<=z<=x} { H(y;T) + y Λ̄((x-z)/y) + θ⁺ z }
/// ```
///
/// For `θ⁺ = ∞` the singular component is pinned at `z = 0` and the convex
/// objective is minimized over `y` alone by golden section inside a
/// geometrically grown bracket; finite `θ⁺` adds a nested search over
/// `z ∈ [0, x]`. Deterministic claims force `y = x/size` outright.
pub fn ruin_exponent(params: &HawkesParams, spec: &RuinSpec) -> Result<RuinExponent> {
    let tau_inf = lln_ruin_time(params, spec.claims(), spec.x());
    if spec.horizon() >= tau_inf {
        return Ok(RuinExponent {
            value: 0.0,
            lln_regime: true,
            y_star: None,
            z_star: None,
        });
    }
    let x = spec.x();
    let t_end = spec.horizon();
    let claims = spec.claims();

    if let ClaimKind::Deterministic { size } = claims.kind() {
        let y = x / size;
        let value = rate_h(params, y, t_end)?.value;
        return Ok(RuinExponent {
            value,
            lln_regime: false,
            y_star: Some(y),
            z_star: None,
        });
    }

    let objective_y = |y: f64, target: f64| -> f64 {
        match rate_h(params, y, t_end) {
            Ok(lr) => lr.value + y * claims.conjugate(target / y),
            Err(_) => f64::INFINITY,
        }
    };

    if claims.theta_plus().is_infinite() {
        let (y_star, value) = minimize_ruin_y(params, t_end, x, &objective_y);
        return Ok(RuinExponent {
            value,
            lln_regime: false,
            y_star: Some(y_star),
            z_star: None,
        });
    }

    // Finite θ⁺: nested convex search over the singular mass z ∈ [0, x].
    let theta_plus = claims.theta_plus();
    let outer = |z: f64| -> f64 {
        let (_, v) = minimize_ruin_y(params, t_end, x - z, &objective_y);
        v + theta_plus * z
    };
    let (z_star, value) = golden_min(outer, 0.0, x, 1e-9 * (1.0 + x), 200);
    let (y_star, _) = minimize_ruin_y(params, t_end, x - z_star, &objective_y);
    Ok(RuinExponent {
        value,
        lln_regime: false,
        y_star: Some(y_star),
        z_star: Some(z_star),
    })
}

/// Minimizes `y ↦ H(y;T) + y Λ̄(target/y)` over `y > 0` (the objective is
/// convex: `H` is convex and `y Λ̄(target/y)` is the perspective of a convex
/// function).
fn minimize_ruin_y<F>(
    params: &HawkesParams,
    t_end: f64,
    target: f64,
    objective: &F,
) -> (f64, f64)
where
    F: Fn(f64, f64) -> f64,
{
    let psi = params.psi(t_end);
    if target <= 0.0 {
        // No claims mass required; the optimum is the free LLN path.
        return (psi, 0.0);
    }
    let f = |y: f64| objective(y, target);
    let start = 0.5 * (psi + target).max(1e-6);
    let floor = 1e-7 * psi.min(target).max(1e-9);
    let ceil = 40.0 * (psi + target);
    golden_min_positive(f, start, floor, ceil, 1e-10)
}

/// Result of the queue-loss optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueLossExponent {
    /// `G(x;T)`; zero when `x` is below the LLN window increment.
    pub value: f64,
    /// True when the loss level is reachable by the fluid path (not a rare
    /// event; the LDP upper bound is trivially 0).
    pub degenerate: bool,
    /// Optimizing window end `s` (second branch only).
    pub s_star: Option<f64>,
    /// Optimizing intermediate state `y = Z_{s-c}/n` (second branch only).
    pub y_star: Option<f64>,
}

/// Largest fluid increment of the count over a service window of length `c`
/// inside `[0, T]`: the loss level is not rare below this.
fn lln_window_increment(params: &HawkesParams, t_end: f64, c: f64) -> f64 {
    let base = params.psi(t_end.min(c));
    if t_end <= c {
        return base;
    }
    // increments ψ(s) - ψ(s-c) = ψ(c) e^{(α-β)(s-c)} are monotone in s
    let grow = (params.alpha() - params.beta()) * (t_end - c);
    base.max(params.psi(c) * grow.exp().max(1.0))
}

/// Loss exponent of the infinite-server queue with deterministic service
/// time `c`:
///
/// ```text
/// G(x;T) = min{ inf_{0<=s<=c} H(x;s),
///               inf_{c<=s<=T} inf_{y>0} { y H(x/y;c) + J(y;s-c) } }
/// ```
///
/// For `T <= c` the first branch alone applies and its infimum sits at the
/// endpoint (`H(x;·)` decreases in the horizon; a coarse interior grid is
/// still checked as a safeguard). The outer `s` of the second branch runs on
/// an adaptive grid (64 points, twice refined 4x around the incumbent), the
/// inner `y` by golden section.
pub fn queue_loss_exponent(
    params: &HawkesParams,
    x: f64,
    t_end: f64,
    c: f64,
) -> Result<QueueLossExponent> {
    for (name, v) in [("x", x), ("T", t_end), ("c", c)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                requirement: "finite and > 0",
            });
        }
    }
    if x <= lln_window_increment(params, t_end, c) * (1.0 + 1e-12) {
        return Ok(QueueLossExponent {
            value: 0.0,
            degenerate: true,
            s_star: None,
            y_star: None,
        });
    }

    let horizon_branch = |s: f64| -> f64 {
        rate_h(params, x, s).map(|lr| lr.value).unwrap_or(f64::INFINITY)
    };

    if t_end <= c {
        let mut value = horizon_branch(t_end);
        // safeguard grid; the endpoint should already be the infimum
        for k in 1..4 {
            value = value.min(horizon_branch(t_end * k as f64 / 4.0));
        }
        return Ok(QueueLossExponent {
            value,
            degenerate: false,
            s_star: None,
            y_star: None,
        });
    }

    let mut branch1 = horizon_branch(c);
    for k in 1..4 {
        branch1 = branch1.min(horizon_branch(c * k as f64 / 4.0));
    }

    // Second branch: split the window at s - c, pay J to move Z there and a
    // scaled H to produce x events over the service window.
    let inner = |s: f64| -> (f64, f64) {
        let lead = s - c;
        if lead <= 1e-12 {
            return (1.0, branch1);
        }
        let edge = (-params.beta() * lead).exp();
        let f = |y: f64| -> f64 {
            let h = match rate_h(params, x / y, c) {
                Ok(lr) => lr.value,
                Err(_) => return f64::INFINITY,
            };
            let j = match rate_j(params, y, lead) {
                Ok(lr) => lr.value,
                Err(_) => return f64::INFINITY,
            };
            y * h + j
        };
        let start = params.lln_z(lead).max(edge * 2.0);
        let floor = edge * (1.0 + 1e-9);
        let ceil = (20.0 * x / params.psi(c)).max(4.0 * start);
        golden_min_positive(f, start, floor, ceil, 1e-9)
    };

    let evaluate_grid = |lo: f64, hi: f64, n: usize| -> (f64, f64, f64) {
        let pts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let results: Vec<(f64, f64, f64)> = pts
            .par_iter()
            .map(|&s| {
                let (y, v) = inner(s);
                (v, s, y)
            })
            .collect();
        results
            .into_iter()
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
            .expect("non-empty grid")
    };

    let (mut best_v, mut best_s, mut best_y) = evaluate_grid(c, t_end, 64);
    let mut half_width = (t_end - c) / 64.0;
    for _ in 0..2 {
        let lo = (best_s - half_width).max(c);
        let hi = (best_s + half_width).min(t_end);
        let (v, s, y) = evaluate_grid(lo, hi, 16);
        if v < best_v {
            best_v = v;
            best_s = s;
            best_y = y;
        }
        half_width /= 4.0;
    }

    if branch1 <= best_v {
        Ok(QueueLossExponent {
            value: branch1,
            degenerate: false,
            s_star: None,
            y_star: None,
        })
    } else {
        Ok(QueueLossExponent {
            value: best_v,
            degenerate: false,
            s_star: Some(best_s),
            y_star: Some(best_y),
        })
    }
}

/// Monte Carlo estimate of the finite-horizon ruin probability at desk
/// scale: simulate claim arrivals with `Z_0 = n`, draw i.i.d. claim sizes,
/// and check the surplus `n·x + ρt - ΣY` at claim instants only (for
/// `ρ >= 0` the surplus rises between claims, so ruin can only occur at a
/// claim).
pub fn mc_ruin_probability(
    params: &HawkesParams,
    spec: &RuinSpec,
    n: f64,
    premium_rate: f64,
    trials: u64,
    seed: u64,
) -> Result<sim::McEstimate> {
    if trials == 0 {
        return Err(Error::EstimatorFailure("zero trials"));
    }
    if premium_rate < 0.0 {
        return Err(Error::Unsupported(
            "negative premium needs between-claim ruin checks",
        ));
    }
    let claims = *spec.claims();
    let surplus0 = n * spec.x();
    let ruined: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            sim::with_trial_path(params, n, spec.horizon(), seed, trial, |path, rng| {
                let mut paid = 0.0;
                for &t in path.event_times() {
                    paid += claims.sample(rng);
                    if surplus0 + premium_rate * t - paid <= 0.0 {
                        return 1u64;
                    }
                }
                0u64
            })
        })
        .sum();
    let p = ruined as f64 / trials as f64;
    Ok(sim::McEstimate {
        value: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
    })
}
