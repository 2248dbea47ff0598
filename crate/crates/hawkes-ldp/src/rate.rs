//! Scalar rate functions `J(x;T)` and `H(x;T)` by Legendre transform of the
//! MGF flows, the sample-path rate functionals `I_Z` and `I_N` by segment
//! quadrature, and the most-likely paths attaining them.
//!
//! ```text
//! J(x;T) = sup_θ { θx - A(T;θ) }            (Z_T/n rate)
//! H(x;T) = sup_θ { θx - C(T;θ/α) + θ/α }    (N_T/n rate)
//! ```
//!
//! Both suprema are solved by bracketed Newton on the strictly monotone
//! stationarity maps `θ ↦ γ(T;θ)` and `θ ↦ r(T;θ)` (strict convexity of the
//! transformed log-MGFs makes these increasing), with bisection fallback and
//! blow-up-aware bracketing toward the explosion boundary.

use crate::error::{Error, Result};
use crate::mgf;
use crate::params::HawkesParams;
use crate::solver::OdeSolution;

/// Where a rate evaluation landed relative to the domain of the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Solved at an interior stationary point.
    Interior,
    /// At the law-of-large-numbers point; the rate vanishes.
    LlnZero,
    /// At (or numerically indistinguishable from) the edge of the domain,
    /// where the optimizing θ runs to -∞; the reported value is the analytic
    /// limit or the value at the left clamp.
    DomainEdge,
    /// Outside the reachable domain; the rate is +∞.
    Infinite,
}

/// A rate-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreResult {
    pub value: f64,
    pub theta_star: Option<f64>,
    pub boundary: Boundary,
    pub iterations: u32,
}

impl LegendreResult {
    fn infinite() -> Self {
        LegendreResult {
            value: f64::INFINITY,
            theta_star: None,
            boundary: Boundary::Infinite,
            iterations: 0,
        }
    }
}

/// Threshold below which the optimizing θ is reported as the LLN point.
const LLN_THETA_TOL: f64 = 1e-9;
/// Residual tolerance (relative to `1 + |x|`) for the stationarity solve.
const ROOT_RTOL: f64 = 1e-10;
const MAX_ROOT_ITER: u32 = 120;

/// One sensitivity-flow evaluation at a trial θ.
struct SensPoint {
    /// γ(T;θ) or r(T;θ)
    value: f64,
    /// its θ-derivative
    slope: f64,
    /// A(T;θ) or C(T;θ/α) - θ/α, the term entering the transform
    objective: f64,
}

fn eval_gamma(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> Option<SensPoint> {
    let sol = mgf::flow_a_sens(params, theta, t_end, tol);
    if sol.blown_up {
        return None;
    }
    let end = sol.end_state();
    Some(SensPoint {
        value: end[1],
        slope: end[2],
        objective: end[0],
    })
}

fn eval_r(params: &HawkesParams, theta: f64, t_end: f64, tol: f64) -> Option<SensPoint> {
    let sol = mgf::flow_c_sens(params, theta, t_end, tol);
    if sol.blown_up {
        return None;
    }
    let end = sol.end_state();
    Some(SensPoint {
        value: end[1],
        slope: end[2],
        objective: end[0] - theta / params.alpha(),
    })
}

/// Solves `map(θ) = x` for the strictly increasing sensitivity map, then
/// assembles the transform value. `left_clamp` is the most negative θ probed
/// before declaring the domain edge.
fn legendre_solve<F>(mut map: F, x: f64, left_clamp: f64) -> Result<LegendreResult>
where
    F: FnMut(f64) -> Option<SensPoint>,
{
    let mut iterations = 1u32;
    let at_zero = map(0.0).expect("θ = 0 never blows up");
    let transform = |theta: f64, p: &SensPoint| (theta * x - p.objective).max(0.0);

    // Bracket [lo, hi]: map(lo) < x, and hi either blows up or has
    // map(hi) >= x. `best_hi` caches the evaluation at a finite hi.
    let mut lo;
    let mut hi;
    let mut lo_pt;
    let mut hi_pt: Option<SensPoint>;

    if at_zero.value >= x {
        // march left
        hi = 0.0;
        hi_pt = Some(at_zero);
        let mut step = 1.0;
        loop {
            let cand = hi - step;
            if cand < left_clamp {
                let p = map(left_clamp).expect("flow with very negative θ survives");
                iterations += 1;
                if p.value >= x {
                    // x is numerically below the reachable range: report the
                    // clamp value as the domain edge.
                    return Ok(LegendreResult {
                        value: transform(left_clamp, &p),
                        theta_star: None,
                        boundary: Boundary::DomainEdge,
                        iterations,
                    });
                }
                lo = left_clamp;
                lo_pt = p;
                break;
            }
            let p = map(cand).expect("flows to the left never blow up");
            iterations += 1;
            if p.value < x {
                lo = cand;
                lo_pt = p;
                break;
            }
            hi = cand;
            hi_pt = Some(p);
            step *= 2.0;
        }
    } else {
        // march right toward the explosion boundary
        lo = 0.0;
        lo_pt = at_zero;
        hi_pt = None;
        let mut step = 0.5;
        hi = loop {
            let cand = lo + step;
            match map(cand) {
                None => break cand, // blown up: valid upper end
                Some(p) => {
                    iterations += 1;
                    if p.value >= x {
                        hi_pt = Some(p);
                        break cand;
                    }
                    lo = cand;
                    lo_pt = p;
                    step *= 2.0;
                }
            }
        };
    }

    // Bracketed Newton with bisection fallback.
    let mut theta = match &hi_pt {
        Some(p) => {
            // secant through the bracket endpoints
            let denom = p.value - lo_pt.value;
            if denom > 0.0 {
                (lo + (x - lo_pt.value) / denom * (hi - lo)).clamp(lo, hi)
            } else {
                0.5 * (lo + hi)
            }
        }
        None => 0.5 * (lo + hi),
    };
    loop {
        if iterations >= MAX_ROOT_ITER {
            return Err(Error::NoConvergence {
                iterations,
                lo,
                hi,
                residual: lo_pt.value - x,
            });
        }
        // Collapsed bracket: x sits numerically at the explosion boundary.
        if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
            return Ok(LegendreResult {
                value: transform(lo, &lo_pt),
                theta_star: Some(lo),
                boundary: Boundary::Interior,
                iterations,
            });
        }
        match map(theta) {
            None => {
                hi = theta;
                hi_pt = None;
                theta = 0.5 * (lo + hi);
                iterations += 1;
            }
            Some(p) => {
                iterations += 1;
                let resid = p.value - x;
                if resid.abs() <= ROOT_RTOL * (1.0 + x.abs()) {
                    let boundary = if theta.abs() <= LLN_THETA_TOL {
                        Boundary::LlnZero
                    } else {
                        Boundary::Interior
                    };
                    return Ok(LegendreResult {
                        value: transform(theta, &p),
                        theta_star: Some(theta),
                        boundary,
                        iterations,
                    });
                }
                if resid < 0.0 {
                    lo = theta;
                    lo_pt = p;
                } else {
                    hi = theta;
                    hi_pt = Some(p);
                }
                // Newton step from the side we just evaluated.
                let side = if resid < 0.0 { &lo_pt } else { hi_pt.as_ref().unwrap() };
                let newton = theta - resid / side.slope;
                theta = if side.slope > 0.0 && newton > lo && newton < hi {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
            }
        }
    }
}

/// `J(x;T)`: rate of `Z_T/n`. Infinite below `e^{-βT}`; `(1-e^{-βT})/β` at
/// the edge; otherwise solved from `γ(T;θ*) = x`.
pub fn rate_j(params: &HawkesParams, x: f64, t_end: f64) -> Result<LegendreResult> {
    rate_j_with_tol(params, x, t_end, mgf::DEFAULT_TOL)
}

/// [`rate_j`] with an explicit ODE tolerance.
pub fn rate_j_with_tol(
    params: &HawkesParams,
    x: f64,
    t_end: f64,
    tol: f64,
) -> Result<LegendreResult> {
    check_horizon(t_end)?;
    if !x.is_finite() {
        return Ok(LegendreResult::infinite());
    }
    let beta = params.beta();
    let edge = (-beta * t_end).exp();
    let edge_value = (1.0 - edge) / beta;
    if (x - edge).abs() <= 1e-12 * (1.0 + edge) {
        return Ok(LegendreResult {
            value: edge_value,
            theta_star: None,
            boundary: Boundary::DomainEdge,
            iterations: 0,
        });
    }
    if x < edge {
        return Ok(LegendreResult::infinite());
    }
    let clamp = -40.0 / params.alpha();
    legendre_solve(|theta| eval_gamma(params, theta, t_end, tol), x, clamp)
}

/// `H(x;T)`: rate of `N_T/n`. `(1-e^{-βT})/β` at `x = 0` (the analytic
/// `θ → -∞` limit); otherwise solved from `r(T;θ*) = x`.
pub fn rate_h(params: &HawkesParams, x: f64, t_end: f64) -> Result<LegendreResult> {
    rate_h_with_tol(params, x, t_end, mgf::DEFAULT_TOL)
}

/// [`rate_h`] with an explicit ODE tolerance.
pub fn rate_h_with_tol(
    params: &HawkesParams,
    x: f64,
    t_end: f64,
    tol: f64,
) -> Result<LegendreResult> {
    check_horizon(t_end)?;
    if !x.is_finite() || x < 0.0 {
        return Ok(LegendreResult::infinite());
    }
    let beta = params.beta();
    if x == 0.0 {
        return Ok(LegendreResult {
            value: (1.0 - (-beta * t_end).exp()) / beta,
            theta_star: None,
            boundary: Boundary::DomainEdge,
            iterations: 0,
        });
    }
    let clamp = -40.0 / params.alpha();
    legendre_solve(|theta| eval_r(params, theta, t_end, tol), x, clamp)
}

fn check_horizon(t_end: f64) -> Result<()> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "T",
            value: t_end,
            requirement: "finite and > 0",
        });
    }
    Ok(())
}

/// Which normalized process a sampled path describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    /// `Z/n` path `g`, with `g(0) = 1`.
    Z,
    /// `N/n` path `h`, with `h(0) = 0` and nondecreasing.
    N,
}

/// A piecewise-linear path on `[0, T]`; derivatives are read as piecewise
/// constant and all quadrature against the path works segment by segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: PathKind,
}

impl SampledPath {
    /// A `Z/n` path; requires `times[0] = 0`, strictly increasing times, and
    /// `g(0) = 1`.
    pub fn z_path(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::validate_grid(&times, &values)?;
        if (values[0] - 1.0).abs() > 1e-9 {
            return Err(Error::MalformedPath("Z path must start at 1"));
        }
        Ok(SampledPath {
            times,
            values,
            kind: PathKind::Z,
        })
    }

    /// An `N/n` path; requires `h(0) = 0` and nondecreasing values.
    pub fn n_path(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::validate_grid(&times, &values)?;
        if values[0].abs() > 1e-9 {
            return Err(Error::MalformedPath("N path must start at 0"));
        }
        for w in values.windows(2) {
            if w[1] < w[0] - 1e-12 * (1.0 + w[0].abs()) {
                return Err(Error::MalformedPath("N path must be nondecreasing"));
            }
        }
        Ok(SampledPath {
            times,
            values,
            kind: PathKind::N,
        })
    }

    fn validate_grid(times: &[f64], values: &[f64]) -> Result<()> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::MalformedPath("need matching grids of length >= 2"));
        }
        if times[0] != 0.0 {
            return Err(Error::MalformedPath("grid must start at 0"));
        }
        for w in times.windows(2) {
            // partial_cmp keeps NaN times out as well
            if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::MalformedPath("grid must be strictly increasing"));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedPath("values must be finite"));
        }
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn end_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// CSV dump with header `t,value`.
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .times
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| vec![crate::csv::fmt_f64(t), crate::csv::fmt_f64(v)])
            .collect();
        crate::csv::table("t,value", &rows)
    }
}

/// `R(a, b) = a log(a/b) - a + b`, the relative-entropy integrand, with the
/// `0 log 0 = 0` convention.
fn rel_entropy(a: f64, b: f64) -> f64 {
    debug_assert!(b > 0.0);
    if a == 0.0 {
        return b;
    }
    a * (a / b).ln() - a + b
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

fn gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Sample-path rate `I_Z(g)` of a sampled `Z/n` path.
///
/// Writing `v = (βg + g')/α` for the event density, the integrand is
/// `R(v, g)`. Each segment between samples is read as carrying a constant
/// event density `v_i`, so `g` follows the exponential `g' = αv_i - βg`
/// through both endpoints:
///
/// ```text
/// v_i = β (g_{i+1} - g_i e^{-βΔ}) / (α (1 - e^{-βΔ}))
/// ```
///
/// This reproduces the boundary path `g(t) = e^{-βt}` (zero density) exactly
/// instead of tripping the slope constraint on every chord; the constraint
/// `g' >= -βg` becomes `v_i >= 0` in integrated form and the rate is
/// infinite when a segment decays faster than that, beyond float slack.
pub fn functional_i_z(params: &HawkesParams, path: &SampledPath) -> Result<f64> {
    if path.kind() != PathKind::Z {
        return Err(Error::MalformedPath("functional_i_z expects a Z path"));
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let mut total = 0.0;
    for i in 0..path.times.len() - 1 {
        let (t0, t1) = (path.times[i], path.times[i + 1]);
        let (g0, g1) = (path.values[i], path.values[i + 1]);
        if g0 <= 0.0 || g1 <= 0.0 {
            return Ok(f64::INFINITY); // log g diverges; the path left the domain
        }
        let decay = (-beta * (t1 - t0)).exp();
        let v = beta * (g1 - g0 * decay) / (alpha * (1.0 - decay));
        let slack = 1e-10 * (1.0 + (beta * g0.max(g1)).abs()) / alpha;
        if v < -slack {
            return Ok(f64::INFINITY);
        }
        let v = v.max(0.0);
        let level = alpha * v / beta;
        let g_at = |t: f64| level + (g0 - level) * (-beta * (t - t0)).exp();
        total += gauss5(|t| rel_entropy(v, g_at(t)), t0, t1);
    }
    Ok(total)
}

/// Sample-path rate `I_N(h)` for a piecewise-linear `N/n` path. The inner
/// state `y(t) = e^{-βt}(1 + ∫_0^t α e^{βs} h'(s) ds)` is advanced exactly
/// per segment (it obeys `y' = -βy + αh'`), and the integrand `R(h', y)` is
/// integrated by segment quadrature.
pub fn functional_i_n(params: &HawkesParams, path: &SampledPath) -> Result<f64> {
    if path.kind() != PathKind::N {
        return Err(Error::MalformedPath("functional_i_n expects an N path"));
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let mut total = 0.0;
    let mut y0 = 1.0;
    for i in 0..path.times.len() - 1 {
        let (t0, t1) = (path.times[i], path.times[i + 1]);
        let dt = t1 - t0;
        let slope = ((path.values[i + 1] - path.values[i]) / dt).max(0.0);
        let level = alpha * slope / beta;
        let y_at = |t: f64| level + (y0 - level) * (-beta * (t - t0)).exp();
        total += gauss5(|t| rel_entropy(slope, y_at(t)), t0, t1);
        y0 = y_at(t1);
    }
    Ok(total)
}

/// Number of fine RK4 substeps used to accumulate the double-exponential
/// integrals of the most-likely `N` path.
const PATH_SUBSTEPS: usize = 32_768;

/// Most-likely `Z/n` path reaching `x` at time `T`:
///
/// ```text
/// g*(t) = exp(∫_0^t α e^{αA(T-s;θ*)} ds - βt)
/// ```
///
/// The Euler-Lagrange costate runs backward (`q(s) = A(T-s;θ*)`, transversal
/// at `q(T) = θ*`), so the exponent integrates the time-reversed `A` flow;
/// over the full interval this accumulates to `log γ(T;θ*)`, hence
/// `g*(T) = x`.
pub fn optimal_path_z(
    params: &HawkesParams,
    x: f64,
    t_end: f64,
    grid_size: usize,
) -> Result<SampledPath> {
    let lr = rate_j(params, x, t_end)?;
    let theta = interior_theta(&lr)?;
    let a_flow = mgf::flow_a(params, theta, t_end, mgf::DEFAULT_TOL);
    debug_assert!(!a_flow.blown_up);
    let times = uniform_grid(t_end, grid_size)?;
    let (alpha, beta) = (params.alpha(), params.beta());
    let integrand = |s: f64| alpha * (alpha * a_flow.eval_component(t_end - s, 0)).exp();

    let substeps = (PATH_SUBSTEPS / (grid_size - 1)).max(8);
    let mut cum = 0.0f64;
    let mut values = Vec::with_capacity(grid_size);
    values.push(1.0);
    for w in times.windows(2) {
        let h_step = (w[1] - w[0]) / substeps as f64;
        let mut s = w[0];
        for _ in 0..substeps {
            // Simpson increment; the integrand is smooth in s
            cum += h_step / 6.0
                * (integrand(s) + 4.0 * integrand(s + 0.5 * h_step) + integrand(s + h_step));
            s += h_step;
        }
        values.push((cum - beta * w[1]).exp());
    }
    SampledPath::z_path(times, values)
}

/// Most-likely `N/n` path reaching `x` at time `T`:
/// `h*(t) = ∫_0^t exp(αC(T-s;θ*/α) + α ∫_0^s e^{αC(T-u;θ*/α)} du - βs) ds`.
///
/// The `C` flow is stored once with dense output; the two nested integrals
/// are then accumulated with a fine fixed-step RK4 pass that lands exactly
/// on the output grid.
pub fn optimal_path_n(
    params: &HawkesParams,
    x: f64,
    t_end: f64,
    grid_size: usize,
) -> Result<SampledPath> {
    let lr = rate_h(params, x, t_end)?;
    let theta = interior_theta(&lr)?;
    let c_flow = mgf::flow_c(params, theta, t_end, mgf::DEFAULT_TOL);
    debug_assert!(!c_flow.blown_up);
    let times = uniform_grid(t_end, grid_size)?;
    let (alpha, beta) = (params.alpha(), params.beta());

    // state: (G1, h) with G1' = e^{αC(T-s)}, h' = exp(αC(T-s) + αG1 - βs)
    let deriv = |s: f64, state: &[f64; 2], c_flow: &OdeSolution<1>| {
        let ac = alpha * c_flow.eval_component(t_end - s, 0);
        let g1p = ac.exp();
        [g1p, (ac + alpha * state[0] - beta * s).exp()]
    };

    let substeps = (PATH_SUBSTEPS / (grid_size - 1)).max(8);
    let mut state = [0.0f64; 2];
    let mut values = Vec::with_capacity(grid_size);
    values.push(0.0);
    for w in times.windows(2) {
        let h_step = (w[1] - w[0]) / substeps as f64;
        let mut s = w[0];
        for _ in 0..substeps {
            let k1 = deriv(s, &state, &c_flow);
            let s2 = s + 0.5 * h_step;
            let st2 = [state[0] + 0.5 * h_step * k1[0], state[1] + 0.5 * h_step * k1[1]];
            let k2 = deriv(s2, &st2, &c_flow);
            let st3 = [state[0] + 0.5 * h_step * k2[0], state[1] + 0.5 * h_step * k2[1]];
            let k3 = deriv(s2, &st3, &c_flow);
            let st4 = [state[0] + h_step * k3[0], state[1] + h_step * k3[1]];
            let k4 = deriv(s + h_step, &st4, &c_flow);
            for i in 0..2 {
                state[i] += h_step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            s += h_step;
        }
        values.push(state[1]);
    }
    SampledPath::n_path(times, values)
}

fn interior_theta(lr: &LegendreResult) -> Result<f64> {
    match lr.boundary {
        Boundary::Interior | Boundary::LlnZero => Ok(lr
            .theta_star
            .expect("interior result carries its optimizer")),
        Boundary::DomainEdge | Boundary::Infinite => Err(Error::Unsupported(
            "most-likely path needs an interior rate solution",
        )),
    }
}

fn uniform_grid(t_end: f64, grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter {
            name: "grid_size",
            value: grid_size as f64,
            requirement: ">= 2",
        });
    }
    let n = grid_size - 1;
    Ok((0..=n)
        .map(|k| {
            if k == n {
                t_end
            } else {
                t_end * k as f64 / n as f64
            }
        })
        .collect())
}
