//! The `figures` subcommand: reproduces the five reference datasets
//! (rate curves of both scalar transforms, the most-likely paths, the ruin
//! exponent sweep, and the queue loss sweep) at the canonical parameters
//! α = β = 1.

use crate::{sweep, write_out, CliError, CliResult, RunConfig};
use hawkes_ldp::csv::fmt_f64;
use hawkes_ldp::*;
use std::path::Path;

pub(crate) fn emit_all(cfg: &RunConfig, out_dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Numeric(format!("cannot create {}: {e}", out_dir.display())))?;
    let p = HawkesParams::new(1.0, 1.0, 0.0)?;
    let file = |name: &str| Some(out_dir.join(name));

    // fig 1: J(x;5), minimum 0 at the LLN point x = 1
    let mut rows = Vec::new();
    for x in sweep(0.5, 6.0, 56) {
        let lr = rate_j(&p, x, 5.0)?;
        rows.push(vec![fmt_f64(x), fmt_f64(lr.value)]);
    }
    write_out(
        &file("fig1_rate_z.csv"),
        &hawkes_ldp::csv::table("x,J", &rows),
    )?;

    // fig 2: H(x;5), minimum 0 at x = ψ(5) = 5
    let mut rows = Vec::new();
    for x in sweep(0.0, 12.0, 49) {
        let lr = rate_h(&p, x, 5.0)?;
        rows.push(vec![fmt_f64(x), fmt_f64(lr.value)]);
    }
    write_out(
        &file("fig2_rate_n.csv"),
        &hawkes_ldp::csv::table("x,H", &rows),
    )?;

    // fig 3: most-likely paths to the endpoints used above (x = 3 for Z,
    // x = 8 for N)
    let g = optimal_path_z(&p, 3.0, 5.0, cfg.grid_size.min(513))?;
    let h = optimal_path_n(&p, 8.0, 5.0, cfg.grid_size.min(513))?;
    let rows: Vec<Vec<String>> = g
        .times()
        .iter()
        .zip(g.values())
        .zip(h.values())
        .map(|((&t, &gv), &hv)| vec![fmt_f64(t), fmt_f64(gv), fmt_f64(hv)])
        .collect();
    write_out(
        &file("fig3_optimal_paths.csv"),
        &hawkes_ldp::csv::table("t,g_star,h_star", &rows),
    )?;

    // fig 4: ruin exponent vs horizon for Poisson(1) claims, x = 0.5;
    // hits zero at T = τ∞ = 0.5
    let claims = ClaimModel::poisson(1.0)?;
    let mut rows = Vec::new();
    for t in sweep(0.05, 0.5, 19) {
        let r = ruin_exponent(&p, &RuinSpec::new(0.5, t, claims)?)?;
        rows.push(vec![fmt_f64(t), fmt_f64(r.value)]);
    }
    write_out(
        &file("fig4_ruin.csv"),
        &hawkes_ldp::csv::table("T,I_tau", &rows),
    )?;

    // fig 5: queue loss exponent vs x at T = 5, c = 1; increasing in x
    let mut rows = Vec::new();
    for x in sweep(1.5, 8.0, 14) {
        let g = queue_loss_exponent(&p, x, 5.0, 1.0)?;
        rows.push(vec![fmt_f64(x), fmt_f64(g.value)]);
    }
    write_out(
        &file("fig5_queue.csv"),
        &hawkes_ldp::csv::table("x,G", &rows),
    )?;

    Ok(())
}
