//! Large-deviations toolkit for linear Markovian Hawkes processes with a
//! large initial intensity.
//!
//! The process `N` is a self-exciting point process with intensity
//! `λ_t = μ + Z_{t-}` where `dZ = -βZ dt + α dN` and `Z_0 = n` is large. This
//! crate computes, and cross-validates against exact simulation:
//!
//! * the scalar rate functions `J(x;T)` of `Z_T/n` and `H(x;T)` of `N_T/n`
//!   via Legendre transforms of MGF flows solved by adaptive Runge-Kutta
//!   ([`rate`], [`mgf`]);
//! * the sample-path rate functionals `I_Z`, `I_N` and their minimizing
//!   (most likely) paths ([`rate`]);
//! * closed-form rates for the joint large-intensity/large-time regimes
//!   ([`regimes`]);
//! * applied tail exponents: finite-horizon insurance ruin with Hawkes claim
//!   arrivals and the loss exponent of an infinite-server queue
//!   ([`applications`]);
//! * exact thinning simulation and Monte Carlo estimators used as ground
//!   truth throughout ([`sim`]).

pub mod applications;
pub mod csv;
pub mod error;
pub mod mgf;
pub mod params;
pub mod rate;
pub mod regimes;
pub mod sim;

mod opt;
mod solver;

pub use applications::{
    lln_ruin_time, mc_ruin_probability, queue_loss_exponent, ruin_exponent, ClaimKind,
    ClaimModel, QueueLossExponent, RuinExponent, RuinSpec,
};
pub use error::{Error, Result};
pub use mgf::{
    find_theta_c, find_theta_d, log_mgf_n, log_mgf_z, sensitivity_gamma, sensitivity_r, solve_a,
    solve_b, solve_c, solve_d, ExplosionBoundary, MgfValue, OdeCurve, DEFAULT_TOL,
};
pub use params::HawkesParams;
pub use rate::{
    functional_i_n, functional_i_z, optimal_path_n, optimal_path_z, rate_h, rate_h_with_tol,
    rate_j, rate_j_with_tol, Boundary,
    LegendreResult, PathKind, SampledPath,
};
pub use regimes::{
    classify, critical_lambda, critical_rate_n, critical_rate_z, decomposition_residual,
    degenerate_limits, subcritical_rate, subcritical_rate_i0, subcritical_rate_i1,
    DegenerateLimits, Regime, RegimeClass,
};
pub use sim::{mc_log_mgf_n, mc_log_mgf_z, mc_mean, simulate, EventPath, McEstimate, SimSpec};
