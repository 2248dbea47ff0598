use crate::error::{Error, Result};

/// Parameters of the linear Markovian Hawkes process.
///
/// The process `N` has intensity `λ_t = μ + Z_{t-}` where the excitation
/// state `Z` jumps by `α` at every event and decays exponentially at rate
/// `β` between events:
///
/// ```text
/// dZ_t = -β Z_t dt + α dN_t
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkesParams {
    alpha: f64,
    beta: f64,
    mu: f64,
}

impl HawkesParams {
    /// Builds a parameter set, rejecting `alpha <= 0`, `beta <= 0`, `mu < 0`
    /// and non-finite inputs.
    pub fn new(alpha: f64, beta: f64, mu: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                requirement: "finite and > 0",
            });
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                requirement: "finite and > 0",
            });
        }
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                requirement: "finite and >= 0",
            });
        }
        Ok(Self { alpha, beta, mu })
    }

    /// Jump size of `Z` per event.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exponential decay rate of `Z`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Base intensity.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Law-of-large-numbers limit of `Z_t / Z_0`, i.e. `e^{(α-β)t}`.
    pub fn lln_z(&self, t: f64) -> f64 {
        ((self.alpha - self.beta) * t).exp()
    }

    /// Law-of-large-numbers limit `ψ(t)` of `N_t / Z_0`:
    /// `(e^{(α-β)t} - 1) / (α-β)`, read as `t` when `α = β`.
    pub fn psi(&self, t: f64) -> f64 {
        let w = self.alpha - self.beta;
        if w == 0.0 {
            t
        } else {
            (w * t).exp_m1() / w
        }
    }
}
