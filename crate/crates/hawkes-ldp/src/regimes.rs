//! Closed-form and semi-closed-form rate functions for the regimes where the
//! initial intensity and the time grow together: critical (`α = β`),
//! super-critical (`α > β`), and sub-critical (`α < β`).

use crate::error::{Error, Result};
use crate::opt::golden_min;
use crate::params::HawkesParams;
use std::f64::consts::PI;

/// Long-time behavior class of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Critical,
    Supercritical,
    Subcritical,
}

/// Outcome of classifying a parameter set, remembering the tolerance that
/// decided the `α = β` test. Callers may construct one directly to force a
/// class for borderline float inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClass {
    pub regime: Regime,
    pub tolerance: f64,
}

/// Classifies by the sign of `α - β` under a relative tolerance
/// `1e-12 · max(α, β)`.
pub fn classify(params: &HawkesParams) -> RegimeClass {
    let tolerance = 1e-12 * params.alpha().max(params.beta());
    let diff = params.alpha() - params.beta();
    let regime = if diff.abs() <= tolerance {
        Regime::Critical
    } else if diff > 0.0 {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    };
    RegimeClass { regime, tolerance }
}

/// Critical-regime rate of `Z_{t_n T}/n`: `2(√x - 1)² / (α²T)` for `x >= 0`,
/// `+∞` otherwise.
pub fn critical_rate_z(alpha: f64, x: f64, t_end: f64) -> f64 {
    debug_assert!(alpha > 0.0 && t_end > 0.0);
    if x < 0.0 {
        return f64::INFINITY;
    }
    let s = x.sqrt() - 1.0;
    2.0 * s * s / (alpha * alpha * t_end)
}

/// The pole of the critical limiting log-MGF: `π² / (2 α² T²)`.
pub fn critical_lambda_pole(alpha: f64, t_end: f64) -> f64 {
    PI * PI / (2.0 * alpha * alpha * t_end * t_end)
}

/// Critical-regime limiting log-MGF of the scaled count:
///
/// ```text
/// Λ(θ) = -√(-2θ)/α · tanh(α √(-θ) T / √2)   for θ <= 0
/// Λ(θ) =  √(2θ)/α  · tan(α √θ T / √2)       for 0 < θ < π²/(2α²T²)
/// ```
///
/// and `+∞` once the tangent argument reaches `π/2`.
pub fn critical_lambda(alpha: f64, theta: f64, t_end: f64) -> f64 {
    debug_assert!(alpha > 0.0 && t_end > 0.0);
    if theta == 0.0 {
        return 0.0;
    }
    if theta > 0.0 {
        if theta >= critical_lambda_pole(alpha, t_end) {
            return f64::INFINITY;
        }
        let root = theta.sqrt();
        (2.0 * theta).sqrt() / alpha * (alpha / std::f64::consts::SQRT_2 * root * t_end).tan()
    } else {
        let root = (-theta).sqrt();
        -(-2.0 * theta).sqrt() / alpha * (alpha / std::f64::consts::SQRT_2 * root * t_end).tanh()
    }
}

/// Critical-regime rate of `N_{t_n T}/(n t_n)`: the Legendre transform
/// `sup_θ {θx - Λ(θ)}`, maximized over `θ` with the right bracket clamped
/// just below the pole (Λ is finite but steep approaching it).
pub fn critical_rate_n(alpha: f64, x: f64, t_end: f64) -> f64 {
    debug_assert!(alpha > 0.0 && t_end > 0.0);
    if x.is_nan() || x <= 0.0 {
        // Λ(θ) → -∞ as θ → -∞, so the transform at x = 0 is +∞ (no events
        // at this scale is super-exponentially rare).
        return f64::INFINITY;
    }
    let hi = (1.0 - 1e-8) * critical_lambda_pole(alpha, t_end);
    let neg_obj = |theta: f64| critical_lambda(alpha, theta, t_end) - theta * x;
    // expand the left end until the concave objective is decreasing there
    let mut lo = -1.0;
    let mut step = 1.0;
    while neg_obj(lo) < neg_obj(lo + 0.25 * step) && lo > -1e12 {
        lo -= step;
        step *= 2.0;
    }
    let (_, neg_best) = golden_min(neg_obj, lo, hi, 1e-12 * (1.0 + hi.abs()), 400);
    (-neg_best).max(0.0)
}

/// Sub-critical rate of `N_{nT}/n`:
///
/// ```text
/// I(x) = x log(βx / (αx + 1 + μβT)) - x + (αx + 1 + μβT)/β
/// ```
///
/// for `x >= 0` (the `x = 0` limit is `(1 + μβT)/β`), `+∞` otherwise.
pub fn subcritical_rate(params: &HawkesParams, x: f64, t_end: f64) -> Result<f64> {
    require_subcritical(params)?;
    let (alpha, beta, mu) = (params.alpha(), params.beta(), params.mu());
    Ok(scaled_entropy_rate(x, alpha, beta, 1.0 + mu * beta * t_end))
}

/// Sub-critical rate with the base intensity switched off (the `N^{(0)}`
/// component): `I⁰(x) = x log(βx/(αx+1)) - x + (αx+1)/β`.
pub fn subcritical_rate_i0(params: &HawkesParams, x: f64) -> Result<f64> {
    require_subcritical(params)?;
    Ok(scaled_entropy_rate(
        x,
        params.alpha(),
        params.beta(),
        1.0,
    ))
}

/// Sub-critical rate of the empty-history component (`N^{(1)}`), speed `t_n`:
///
/// ```text
/// I¹(x) = T [ (x/T) log((x/T) / (μ + (x/T)(α/β))) - x/T + (x/T)(α/β) + μ ]
/// ```
pub fn subcritical_rate_i1(params: &HawkesParams, x: f64, t_end: f64) -> Result<f64> {
    require_subcritical(params)?;
    if params.mu() <= 0.0 {
        return Err(Error::Unsupported("I1 requires mu > 0"));
    }
    let (alpha, beta, mu) = (params.alpha(), params.beta(), params.mu());
    // Same one-parameter family: I1(x) = s · I0(x/s) with s = μβT.
    Ok(scaled_entropy_rate(x, alpha, beta, mu * beta * t_end))
}

/// The common closed form `x log(βx/(αx+s)) - x + (αx+s)/β`, evaluated with
/// its analytic `x → 0` limit `s/β` so the boundary carries no NaN.
fn scaled_entropy_rate(x: f64, alpha: f64, beta: f64, s: f64) -> f64 {
    if x < 0.0 {
        return f64::INFINITY;
    }
    if x == 0.0 {
        return s / beta;
    }
    x * (beta * x / (alpha * x + s)).ln() - x + (alpha * x + s) / beta
}

/// `|inf_{0<=y<=x} { I0(x-y) + I1(y) } - I(x)|`: the numeric gap of the
/// independent-decomposition identity, minimized by a grid scan followed by
/// golden-section refinement. The residual is reported, never asserted.
pub fn decomposition_residual(
    params: &HawkesParams,
    x: f64,
    t_end: f64,
    grid_size: usize,
) -> Result<f64> {
    require_subcritical(params)?;
    if params.mu() <= 0.0 {
        return Err(Error::Unsupported("decomposition requires mu > 0"));
    }
    if x < 0.0 || grid_size < 3 {
        return Err(Error::InvalidParameter {
            name: "x/grid_size",
            value: x,
            requirement: "x >= 0 and grid_size >= 3",
        });
    }
    let objective = |y: f64| {
        subcritical_rate_i0(params, x - y).unwrap() + subcritical_rate_i1(params, y, t_end).unwrap()
    };
    let n = grid_size - 1;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let y = x * i as f64 / n as f64;
        let v = objective(y);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = x * best_i.saturating_sub(1) as f64 / n as f64;
    let hi = x * (best_i + 1).min(n) as f64 / n as f64;
    let (_, refined) = if hi > lo {
        golden_min(objective, lo, hi, 1e-12 * (1.0 + x), 300)
    } else {
        (lo, best)
    };
    let direct = subcritical_rate(params, x, t_end)?;
    Ok((refined.min(best) - direct).abs())
}

fn require_subcritical(params: &HawkesParams) -> Result<()> {
    if classify(params).regime != Regime::Subcritical {
        return Err(Error::Unsupported("requires beta > alpha (sub-critical)"));
    }
    Ok(())
}

/// Concentration description of the degenerate large-time limits: where the
/// scaled process piles up, and the time sequence `t_n = log n / rate` the
/// statement is phrased with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateLimits {
    pub regime: Regime,
    pub horizon: f64,
    /// Limit of the scaled `Z`; always 1.
    pub z_limit: f64,
    /// Limit of the scaled `N` (super-critical only): `1/(α-β)`.
    pub n_limit: Option<f64>,
    /// `t_n = log n / log_time_rate`.
    pub log_time_rate: f64,
    /// `Z_{t_n T}` concentrates at `n^{z_scale_exponent}`: `1+T` above
    /// criticality, `1-T` below.
    pub z_scale_exponent: f64,
}

impl DegenerateLimits {
    pub fn t_n(&self, n: f64) -> f64 {
        n.ln() / self.log_time_rate
    }

    pub fn z_scale(&self, n: f64) -> f64 {
        n.powf(self.z_scale_exponent)
    }
}

/// Reports the degenerate concentration constants for the requested regime.
/// The rate functions in these regimes are indicator-degenerate, so only the
/// constants and the prescribed `t_n` convention are returned.
pub fn degenerate_limits(
    params: &HawkesParams,
    class: RegimeClass,
    t_end: f64,
) -> Result<DegenerateLimits> {
    if classify(params).regime != class.regime {
        return Err(Error::Unsupported("regime class does not match parameters"));
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    match class.regime {
        Regime::Supercritical => Ok(DegenerateLimits {
            regime: class.regime,
            horizon: t_end,
            z_limit: 1.0,
            n_limit: Some(1.0 / (alpha - beta)),
            log_time_rate: alpha - beta,
            z_scale_exponent: 1.0 + t_end,
        }),
        Regime::Subcritical => Ok(DegenerateLimits {
            regime: class.regime,
            horizon: t_end,
            z_limit: 1.0,
            n_limit: None,
            log_time_rate: beta - alpha,
            z_scale_exponent: 1.0 - t_end,
        }),
        Regime::Critical => Err(Error::Unsupported(
            "critical regime has non-degenerate limits; use the closed forms",
        )),
    }
}
