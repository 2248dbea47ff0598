//! Application-layer checks: conjugates against scalar maximization, the
//! ruin and queue exponents against brute-force grids, monotonicity sweeps,
//! and the Monte Carlo ruin slope.

mod common;

use common::*;
use hawkes_ldp::*;

fn params(alpha: f64, beta: f64, mu: f64) -> HawkesParams {
    HawkesParams::new(alpha, beta, mu).unwrap()
}

#[test]
fn claim_conjugates_match_scalar_maximization() {
    // exponential(1) at v = 2: sup_θ {2θ + log(1-θ)} = 1 - log 2
    let exp = ClaimModel::exponential(1.0).unwrap();
    let (_, oracle) = golden_max(|th: f64| 2.0 * th + (1.0 - th).ln(), -20.0, 1.0 - 1e-12, 1e-12);
    assert!((oracle - (1.0 - (2.0f64).ln())).abs() < 1e-9);
    assert!((exp.conjugate(2.0) - oracle).abs() < 1e-9);

    // poisson(1) at v = 2: sup_θ {2θ - (e^θ - 1)}
    let pois = ClaimModel::poisson(1.0).unwrap();
    let (_, oracle) = golden_max(|th: f64| 2.0 * th - th.exp_m1(), -20.0, 20.0, 1e-12);
    assert!((pois.conjugate(2.0) - oracle).abs() < 1e-9);
}

#[test]
fn ruin_exponent_matches_brute_force_grid() {
    let p = params(1.0, 1.0, 0.0);
    let claims = ClaimModel::poisson(1.0).unwrap();
    let spec = RuinSpec::new(0.5, 0.2, claims).unwrap();
    let mine = ruin_exponent(&p, &spec).unwrap().value;
    let oracle = ruin_brute_force(1.0, 1.0, 0.5, 0.2);
    assert!(
        (mine - oracle).abs() <= 1e-3,
        "ruin exponent {mine} vs brute force {oracle}"
    );
}

#[test]
fn ruin_exponent_is_nonincreasing_in_horizon_and_vanishes_at_tau() {
    let p = params(1.0, 1.0, 0.0);
    let claims = ClaimModel::poisson(1.0).unwrap();
    let mut prev = f64::INFINITY;
    for t in [0.1, 0.2, 0.3, 0.4, 0.45, 0.49] {
        let v = ruin_exponent(&p, &RuinSpec::new(0.5, t, claims).unwrap())
            .unwrap()
            .value;
        assert!(v <= prev + 1e-9, "I_tau increased at T = {t}");
        assert!(v > 0.0, "positive before the LLN ruin time");
        prev = v;
    }
    let at_tau = ruin_exponent(&p, &RuinSpec::new(0.5, 0.5, claims).unwrap()).unwrap();
    assert_eq!(at_tau.value, 0.0);
    assert!(at_tau.lln_regime);
}

#[test]
fn ruin_exponent_is_nondecreasing_in_surplus() {
    // more surplus to burn means rarer ruin
    let p = params(1.0, 1.0, 0.0);
    let claims = ClaimModel::poisson(1.0).unwrap();
    let mut prev = 0.0;
    for x in [0.25, 0.5, 0.75, 1.0, 1.5] {
        let v = ruin_exponent(&p, &RuinSpec::new(x, 0.2, claims).unwrap())
            .unwrap()
            .value;
        assert!(v >= prev - 1e-9, "I_tau decreased at x = {x}");
        prev = v;
    }
}

#[test]
fn ruin_golden_section_matches_plain_grid_scan() {
    // the 1-D objective is convex; a plain grid scan over y must agree
    let p = params(1.0, 1.0, 0.0);
    let claims = ClaimModel::poisson(1.0).unwrap();
    let spec = RuinSpec::new(0.5, 0.3, claims).unwrap();
    let mine = ruin_exponent(&p, &spec).unwrap().value;
    let mut grid_best = f64::INFINITY;
    let mut y = 0.01;
    while y <= 2.0 {
        let v = rate_h(&p, y, 0.3).unwrap().value + y * claims.conjugate(0.5 / y);
        grid_best = grid_best.min(v);
        y += 1e-3;
    }
    assert!((mine - grid_best).abs() <= 1e-3, "{mine} vs {grid_best}");
}

#[test]
fn exponential_claims_use_the_singular_component_channel() {
    // with finite θ⁺ the optimizer may park mass in z; the exponent must be
    // no larger than the z = 0 objective and stay positive
    let p = params(1.0, 1.0, 0.0);
    let claims = ClaimModel::exponential(1.0).unwrap();
    let spec = RuinSpec::new(0.5, 0.2, claims).unwrap();
    let r = ruin_exponent(&p, &spec).unwrap();
    assert!(!r.lln_regime);
    assert!(r.value > 0.0);
    assert!(r.z_star.is_some());
    let z0_objective = {
        let mut best = f64::INFINITY;
        let mut y = 0.005;
        while y <= 1.0 {
            let v = rate_h(&p, y, 0.2).unwrap().value + y * claims.conjugate(0.5 / y);
            best = best.min(v);
            y += 2e-3;
        }
        best
    };
    assert!(r.value <= z0_objective + 1e-6, "{} vs {z0_objective}", r.value);
}

#[test]
fn queue_loss_matches_brute_force_grid() {
    let p = params(1.0, 1.0, 0.0);
    let mine = queue_loss_exponent(&p, 5.0, 5.0, 1.0).unwrap().value;
    let oracle = queue_brute_force(1.0, 1.0, 5.0, 5.0, 1.0);
    assert!(
        (mine - oracle).abs() <= 1e-3,
        "queue exponent {mine} vs brute force {oracle}"
    );
}

#[test]
fn queue_loss_nonincreasing_in_horizon() {
    let p = params(1.0, 1.0, 0.0);
    let mut prev = f64::INFINITY;
    for t in [2.0, 3.0, 4.0, 5.0] {
        let v = queue_loss_exponent(&p, 5.0, t, 1.0).unwrap().value;
        assert!(v <= prev + 1e-6, "G increased at T = {t}");
        prev = v;
    }
}

#[test]
fn mc_ruin_slope_descends_toward_the_exponent() {
    let p = params(1.0, 1.0, 0.0);
    let claims = ClaimModel::poisson(1.0).unwrap();
    let spec = RuinSpec::new(0.5, 0.2, claims).unwrap();
    let i_tau = ruin_exponent(&p, &spec).unwrap().value;

    let mut ratios = Vec::new();
    let mut logs = Vec::new();
    for n in [10.0f64, 20.0, 40.0] {
        let est = mc_ruin_probability(&p, &spec, n, 0.0, 1_000_000, 42).unwrap();
        ratios.push(-est.value.ln() / n);
        logs.push(est.value.ln());
    }
    // the per-n ratios decrease toward I_tau and stay above it
    assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2]);
    assert!(ratios[2] > i_tau);
    // the fitted slope between the two largest n cancels the O(1/n)
    // prefactor and lands within 25%
    let slope = -(logs[2] - logs[1]) / 20.0;
    assert!(
        ((slope - i_tau) / i_tau).abs() <= 0.25,
        "fitted slope {slope} vs I_tau {i_tau}"
    );
}
