//! Exact simulation of the linear Markovian Hawkes process and the Monte
//! Carlo estimators used as ground truth for the analytic modules.
//!
//! Between events the intensity `μ + Z` decays monotonically, so the value at
//! the last event dominates the intensity until the next one. Thinning
//! against that piecewise-constant bound is therefore exact: propose
//! exponential candidates at rate `μ + Z(t_last)` and accept a candidate `t`
//! with probability `(μ + Z(t-)) / (μ + Z(t_last))`.
//!
//! The paper's convention `Z_0 = Z_{0-}` is adopted: there is no jump at
//! time zero, `Z` starts from the given initial value and decays until the
//! first event.

use crate::error::{Error, Result};
use crate::params::HawkesParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// What to simulate: initial state, horizon, and the RNG seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    z0: f64,
    horizon: f64,
    seed: u64,
}

impl SimSpec {
    pub fn new(z0: f64, horizon: f64, seed: u64) -> Result<Self> {
        if !z0.is_finite() || z0 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "z0",
                value: z0,
                requirement: "finite and >= 0",
            });
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "horizon",
                value: horizon,
                requirement: "finite and > 0",
            });
        }
        Ok(Self { z0, horizon, seed })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// One simulated realization: the event times, plus everything needed to
/// reconstruct `Z` and `N` exactly (`Z` is a deterministic functional of the
/// times).
#[derive(Debug, Clone, PartialEq)]
pub struct EventPath {
    event_times: Vec<f64>,
    params: HawkesParams,
    z0: f64,
    horizon: f64,
}

impl EventPath {
    /// Builds a path from explicit event times, validating that they are
    /// strictly increasing and contained in `(0, horizon]`.
    pub fn from_times(
        params: HawkesParams,
        z0: f64,
        horizon: f64,
        event_times: Vec<f64>,
    ) -> Result<Self> {
        if z0.is_nan() || z0 < 0.0 || horizon.is_nan() || horizon <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "z0/horizon",
                value: z0,
                requirement: "z0 >= 0 and horizon > 0",
            });
        }
        let mut prev = 0.0;
        for &t in &event_times {
            // partial_cmp keeps NaN times out as well
            if t.partial_cmp(&prev) != Some(std::cmp::Ordering::Greater) || t > horizon {
                return Err(Error::MalformedEventTimes);
            }
            prev = t;
        }
        Ok(Self {
            event_times,
            params,
            z0,
            horizon,
        })
    }

    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    pub fn params(&self) -> &HawkesParams {
        &self.params
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `Z_t = Z_0 e^{-βt} + Σ_{τ_i <= t} α e^{-β(t-τ_i)}`, evaluated exactly.
    pub fn z_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let beta = self.params.beta();
        let alpha = self.params.alpha();
        let mut z = self.z0 * (-beta * t).exp();
        for &tau in &self.event_times {
            if tau > t {
                break;
            }
            z += alpha * (-beta * (t - tau)).exp();
        }
        Ok(z)
    }

    /// Number of events in `(0, t]`.
    pub fn count(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.event_times.partition_point(|&tau| tau <= t))
    }

    /// `∫_0^t Z_s ds`, accumulated segment by segment with the closed-form
    /// integral of the exponential decay (no grid).
    pub fn z_integral(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let beta = self.params.beta();
        let alpha = self.params.alpha();
        let mut total = 0.0;
        let mut z = self.z0; // value right after the previous event (or at 0)
        let mut t_prev = 0.0;
        for &tau in &self.event_times {
            if tau > t {
                break;
            }
            let dt = tau - t_prev;
            total += z * (1.0 - (-beta * dt).exp()) / beta;
            z = z * (-beta * dt).exp() + alpha;
            t_prev = tau;
        }
        let dt = t - t_prev;
        total += z * (1.0 - (-beta * dt).exp()) / beta;
        Ok(total)
    }

    /// Dumps the path as CSV with header `t,event_index`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,event_index\n");
        for (i, &t) in self.event_times.iter().enumerate() {
            out.push_str(&crate::csv::fmt_f64(t));
            out.push(',');
            out.push_str(&(i + 1).to_string());
            out.push('\n');
        }
        out
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }
}

/// Derives the RNG for one Monte Carlo trial. ChaCha streams make the
/// per-trial generators independent and reproducible regardless of how the
/// trials are scheduled across threads.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws one exact sample of the Hawkes process on `[0, horizon]`.
/// Deterministic given `spec.seed`.
pub fn simulate(params: &HawkesParams, spec: &SimSpec) -> EventPath {
    let mut rng = trial_rng(spec.seed(), 0);
    simulate_with_rng(params, spec.z0(), spec.horizon(), &mut rng)
}

/// Thinning loop shared by `simulate` and the Monte Carlo estimators.
fn simulate_with_rng<R: Rng>(
    params: &HawkesParams,
    z0: f64,
    horizon: f64,
    rng: &mut R,
) -> EventPath {
    let alpha = params.alpha();
    let beta = params.beta();
    let mu = params.mu();

    let mut events = Vec::new();
    let mut t_last = 0.0; // time of the last accepted event (or 0)
    let mut z_last = z0; // Z right after that event
    let mut t = 0.0; // current proposal clock
    loop {
        let bound = mu + z_last;
        if bound <= 0.0 {
            break; // zero intensity forever (mu = 0 and no mass left)
        }
        let u: f64 = rng.random::<f64>();
        // Exponential(bound) waiting time; 1-u avoids ln(0).
        t += -(1.0 - u).ln() / bound;
        if t > horizon {
            break;
        }
        let z_cand = z_last * (-beta * (t - t_last)).exp();
        let accept: f64 = rng.random::<f64>();
        if accept * bound <= mu + z_cand {
            events.push(t);
            z_last = z_cand + alpha;
            t_last = t;
        }
    }
    EventPath {
        event_times: events,
        params: *params,
        z0,
        horizon,
    }
}

/// A Monte Carlo estimate together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Log of the empirical mean of `e^{θ Z_T}` over `trials` independent
/// replications, with the delta-method standard error of the log.
///
/// The mean is accumulated in log-sum-exp form so the estimator does not
/// overflow; callers should still keep `θ` below the explosion boundary
/// `θ_c(T)` or the variance becomes useless at desk scale.
pub fn mc_log_mgf_z(
    params: &HawkesParams,
    spec: &SimSpec,
    theta: f64,
    trials: u64,
) -> Result<McEstimate> {
    mc_log_mgf(params, spec, theta, trials, |path| {
        path.z_at(path.horizon()).expect("horizon is in range")
    })
}

/// Same estimator for `e^{θ N_T}`.
pub fn mc_log_mgf_n(
    params: &HawkesParams,
    spec: &SimSpec,
    theta: f64,
    trials: u64,
) -> Result<McEstimate> {
    mc_log_mgf(params, spec, theta, trials, |path| {
        path.event_times().len() as f64
    })
}

fn mc_log_mgf<F>(
    params: &HawkesParams,
    spec: &SimSpec,
    theta: f64,
    trials: u64,
    statistic: F,
) -> Result<McEstimate>
where
    F: Fn(&EventPath) -> f64 + Sync,
{
    if trials == 0 {
        return Err(Error::EstimatorFailure("zero trials"));
    }
    let exponents: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(spec.seed(), trial);
            let path = simulate_with_rng(params, spec.z0(), spec.horizon(), &mut rng);
            theta * statistic(&path)
        })
        .collect();

    let m = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return Err(Error::EstimatorFailure("non-finite exponent sample"));
    }
    let n = trials as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &e in &exponents {
        let w = (e - m).exp();
        sum += w;
        sum_sq += w * w;
    }
    let mean = sum / n;
    // log E[e^{θX}] = m + log(mean of shifted weights)
    let estimate = m + mean.ln();
    // Var of the shifted weights; delta method for the log of the mean.
    let var = (sum_sq / n - mean * mean).max(0.0);
    let std_error = (var / n).sqrt() / mean;
    if !estimate.is_finite() || !std_error.is_finite() {
        return Err(Error::EstimatorFailure("estimator overflowed"));
    }
    Ok(McEstimate {
        value: estimate,
        std_error,
    })
}

/// Empirical mean and standard error of an arbitrary per-path statistic,
/// used by the validation workflows and the concentration smoke tests.
pub fn mc_mean<F>(
    params: &HawkesParams,
    spec: &SimSpec,
    trials: u64,
    statistic: F,
) -> Result<McEstimate>
where
    F: Fn(&EventPath) -> f64 + Sync,
{
    if trials == 0 {
        return Err(Error::EstimatorFailure("zero trials"));
    }
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(spec.seed(), trial);
            let path = simulate_with_rng(params, spec.z0(), spec.horizon(), &mut rng);
            statistic(&path)
        })
        .collect();
    let n = trials as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(McEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
    })
}

/// Runs one seeded trial and hands the path and its RNG to a consumer that
/// needs additional randomness coupled to the path (e.g. claim sizes).
pub(crate) fn with_trial_path<F, T>(
    params: &HawkesParams,
    z0: f64,
    horizon: f64,
    seed: u64,
    trial: u64,
    consume: F,
) -> T
where
    F: FnOnce(&EventPath, &mut ChaCha8Rng) -> T,
{
    let mut rng = trial_rng(seed, trial);
    let path = simulate_with_rng(params, z0, horizon, &mut rng);
    consume(&path, &mut rng)
}
