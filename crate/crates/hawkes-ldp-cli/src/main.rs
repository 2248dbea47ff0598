//! Command-line front end: rate-function sweeps, most-likely paths, applied
//! tail exponents, exact simulation, Monte Carlo validation, and figure-data
//! reproduction. All outputs are headered CSV at full float precision with
//! LF endings, byte-identical across runs with identical arguments.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hawkes_ldp::csv::fmt_f64;
use hawkes_ldp::*;
use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

mod figures;

/// CLI-level failure, carrying the exit code class.
pub(crate) enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "hawkes-ldp",
    about = "Large-deviations rate functions and tail exponents for Hawkes processes with a large initial intensity",
    version
)]
struct Cli {
    /// Optional flat `key = value` config file; explicit flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Process parameters and solver knobs shared by every subcommand. Values
/// resolve as: explicit flag, then config-file entry, then the documented
/// default.
#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Jump size of Z per event [default: 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Exponential decay rate [default: 1]
    #[arg(long)]
    beta: Option<f64>,
    /// Base intensity [default: 0]
    #[arg(long)]
    mu: Option<f64>,
    /// ODE local-error tolerance [default: 1e-10]
    #[arg(long)]
    tol: Option<f64>,
    /// Monte Carlo trials [default: 100000]
    #[arg(long)]
    trials: Option<u64>,
    /// Path sample count [default: 2048]
    #[arg(long)]
    grid_size: Option<usize>,
    /// RNG seed [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Output file [default: stdout]
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Fully resolved run configuration.
pub(crate) struct RunConfig {
    pub params: HawkesParams,
    pub tol: f64,
    pub trials: u64,
    pub grid_size: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RateKind {
    Z,
    N,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a scalar rate function over x: CSV `x,rate,theta_star,boundary`
    Rate {
        #[command(flatten)]
        common: CommonArgs,
        /// Which rate: z for Z_T/n (J), n for N_T/n (H)
        #[arg(long, value_enum)]
        kind: RateKind,
        /// Horizon T
        #[arg(long)]
        horizon: f64,
        #[arg(long)]
        x_min: f64,
        #[arg(long)]
        x_max: f64,
        /// Number of sweep rows
        #[arg(long, default_value_t = 56)]
        steps: usize,
    },
    /// Most-likely path to a rare endpoint: CSV `t,value`
    Path {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        kind: RateKind,
        #[arg(long)]
        horizon: f64,
        /// Target endpoint x
        #[arg(long)]
        x: f64,
    },
    /// Finite-horizon ruin exponent sweep: CSV `T,I_tau` or `x,I_tau`
    Ruin {
        #[command(flatten)]
        common: CommonArgs,
        /// Claim model: poisson:RATE, det:SIZE, or exp:MEAN
        #[arg(long)]
        claims: String,
        /// Scaled initial surplus (fix x and give a T-range, or --horizon)
        #[arg(long)]
        x: Option<f64>,
        /// Fixed horizon (with --x-min/--x-max this sweeps x)
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 19)]
        steps: usize,
    },
    /// Infinite-server queue loss exponent sweep: CSV `x,G` or `T,G`
    Queue {
        #[command(flatten)]
        common: CommonArgs,
        /// Deterministic service time c
        #[arg(long)]
        window: f64,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 14)]
        steps: usize,
    },
    /// Draw one exact Hawkes path: CSV `t,event_index`
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Initial intensity contribution Z_0
        #[arg(long)]
        z0: f64,
        #[arg(long)]
        horizon: f64,
    },
    /// Compare Monte Carlo log-MGFs against the ODE predictions
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        z0: f64,
        #[arg(long)]
        horizon: f64,
        /// Comma-separated θ values
        #[arg(long, value_delimiter = ',')]
        thetas: Vec<f64>,
    },
    /// Closed-form rate curves for the detected regime
    Regime {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        horizon: f64,
        #[arg(long)]
        x_min: f64,
        #[arg(long)]
        x_max: f64,
        #[arg(long, default_value_t = 49)]
        steps: usize,
        /// Where to write Λ(θ) samples in the critical regime
        /// [default: appended to the main output]
        #[arg(long)]
        lambda_output: Option<PathBuf>,
    },
    /// Emit the five reference figure datasets (canonical parameters
    /// α = β = 1) into a directory
    Figures {
        #[command(flatten)]
        common: CommonArgs,
        /// Target directory (created if missing)
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.config.as_deref().map(read_config).transpose() {
        Ok(map) => map.unwrap_or_default(),
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &config) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Parses a flat `key = value` file; `#` starts a comment.
fn read_config(path: &std::path::Path) -> std::result::Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not `key = value`", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn lookup<T: std::str::FromStr>(
    config: &HashMap<String, String>,
    key: &str,
) -> CliResult<Option<T>> {
    match config.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            CliError::Usage(format!("config key `{key}` has invalid value `{raw}`"))
        }),
    }
}

impl CommonArgs {
    fn resolve(&self, config: &HashMap<String, String>) -> CliResult<RunConfig> {
        let alpha = self.alpha.or(lookup(config, "alpha")?).unwrap_or(1.0);
        let beta = self.beta.or(lookup(config, "beta")?).unwrap_or(1.0);
        let mu = self.mu.or(lookup(config, "mu")?).unwrap_or(0.0);
        let tol = self.tol.or(lookup(config, "tol")?).unwrap_or(1e-10);
        let trials = self.trials.or(lookup(config, "trials")?).unwrap_or(100_000);
        let grid_size = self
            .grid_size
            .or(lookup(config, "grid_size")?)
            .unwrap_or(2048);
        let seed = self.seed.or(lookup(config, "seed")?).unwrap_or(42);
        let params = HawkesParams::new(alpha, beta, mu)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(RunConfig {
            params,
            tol,
            trials,
            grid_size,
            seed,
            output: self.output.clone(),
        })
    }
}

pub(crate) fn write_out(output: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .expect("stdout");
            Ok(())
        }
    }
}

pub(crate) fn sweep(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 || hi <= lo {
        return vec![lo];
    }
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                hi // land on the endpoint exactly
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

/// Rejects non-positive user-supplied magnitudes as usage errors (exit 2),
/// before they reach the solvers.
fn require_positive(name: &str, v: f64) -> CliResult<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(CliError::Usage(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn boundary_label(b: Boundary) -> &'static str {
    match b {
        Boundary::Interior => "interior",
        Boundary::LlnZero => "lln_zero",
        Boundary::DomainEdge => "domain_edge",
        Boundary::Infinite => "infinite",
    }
}

fn parse_claims(spec: &str) -> CliResult<ClaimModel> {
    let bad = || {
        CliError::Usage(format!(
            "claim model `{spec}` is not poisson:RATE, det:SIZE, or exp:MEAN"
        ))
    };
    let (kind, value) = spec.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.parse().map_err(|_| bad())?;
    let model = match kind {
        "poisson" => ClaimModel::poisson(value),
        "det" | "deterministic" => ClaimModel::deterministic(value),
        "exp" | "exponential" => ClaimModel::exponential(value),
        _ => return Err(bad()),
    };
    model.map_err(|e| CliError::Usage(e.to_string()))
}

fn run(command: Command, config: &HashMap<String, String>) -> CliResult<ExitCode> {
    match command {
        Command::Rate {
            common,
            kind,
            horizon,
            x_min,
            x_max,
            steps,
        } => {
            let cfg = common.resolve(config)?;
            require_positive("--horizon", horizon)?;
            let mut failed = false;
            let mut rows = Vec::new();
            for x in sweep(x_min, x_max, steps) {
                let result = match kind {
                    RateKind::Z => rate_j_with_tol(&cfg.params, x, horizon, cfg.tol),
                    RateKind::N => rate_h_with_tol(&cfg.params, x, horizon, cfg.tol),
                };
                match result {
                    Ok(lr) => rows.push(vec![
                        fmt_f64(x),
                        fmt_f64(lr.value),
                        lr.theta_star.map(fmt_f64).unwrap_or_default(),
                        boundary_label(lr.boundary).to_string(),
                    ]),
                    Err(e) => {
                        failed = true;
                        rows.push(vec![
                            fmt_f64(x),
                            format!("failed: {e}"),
                            String::new(),
                            String::new(),
                        ]);
                    }
                }
            }
            write_out(
                &cfg.output,
                &hawkes_ldp::csv::table("x,rate,theta_star,boundary", &rows),
            )?;
            Ok(if failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Path {
            common,
            kind,
            horizon,
            x,
        } => {
            let cfg = common.resolve(config)?;
            require_positive("--horizon", horizon)?;
            let path = match kind {
                RateKind::Z => optimal_path_z(&cfg.params, x, horizon, cfg.grid_size)?,
                RateKind::N => optimal_path_n(&cfg.params, x, horizon, cfg.grid_size)?,
            };
            write_out(&cfg.output, &path.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Ruin {
            common,
            claims,
            x,
            horizon,
            t_min,
            t_max,
            x_min,
            x_max,
            steps,
        } => {
            let cfg = common.resolve(config)?;
            let claims = parse_claims(&claims)?;
            for (name, v) in [("--x", x), ("--horizon", horizon), ("--t-min", t_min), ("--t-max", t_max), ("--x-min", x_min), ("--x-max", x_max)] {
                if let Some(v) = v {
                    require_positive(name, v)?;
                }
            }
            let csv = match (x, horizon, t_min, t_max, x_min, x_max) {
                (Some(x), _, Some(lo), Some(hi), None, None) => {
                    let mut rows = Vec::new();
                    for t in sweep(lo, hi, steps) {
                        let spec = RuinSpec::new(x, t, claims)?;
                        let r = ruin_exponent(&cfg.params, &spec)?;
                        rows.push(vec![fmt_f64(t), fmt_f64(r.value)]);
                    }
                    hawkes_ldp::csv::table("T,I_tau", &rows)
                }
                (None, Some(t), None, None, Some(lo), Some(hi)) => {
                    let mut rows = Vec::new();
                    for xv in sweep(lo, hi, steps) {
                        let spec = RuinSpec::new(xv, t, claims)?;
                        let r = ruin_exponent(&cfg.params, &spec)?;
                        rows.push(vec![fmt_f64(xv), fmt_f64(r.value)]);
                    }
                    hawkes_ldp::csv::table("x,I_tau", &rows)
                }
                (Some(x), Some(t), None, None, None, None) => {
                    let spec = RuinSpec::new(x, t, claims)?;
                    let r = ruin_exponent(&cfg.params, &spec)?;
                    hawkes_ldp::csv::table("T,I_tau", &[vec![fmt_f64(t), fmt_f64(r.value)]])
                }
                _ => {
                    return Err(CliError::Usage(
                        "ruin needs --x with --t-min/--t-max, or --horizon with --x-min/--x-max, or --x with --horizon"
                            .to_string(),
                    ))
                }
            };
            write_out(&cfg.output, &csv)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Queue {
            common,
            window,
            x,
            horizon,
            t_min,
            t_max,
            x_min,
            x_max,
            steps,
        } => {
            let cfg = common.resolve(config)?;
            require_positive("--window", window)?;
            for (name, v) in [("--x", x), ("--horizon", horizon), ("--t-min", t_min), ("--t-max", t_max), ("--x-min", x_min), ("--x-max", x_max)] {
                if let Some(v) = v {
                    require_positive(name, v)?;
                }
            }
            let csv = match (x, horizon, t_min, t_max, x_min, x_max) {
                (Some(x), _, Some(lo), Some(hi), None, None) => {
                    let mut rows = Vec::new();
                    for t in sweep(lo, hi, steps) {
                        let g = queue_loss_exponent(&cfg.params, x, t, window)?;
                        rows.push(vec![fmt_f64(t), fmt_f64(g.value)]);
                    }
                    hawkes_ldp::csv::table("T,G", &rows)
                }
                (None, Some(t), None, None, Some(lo), Some(hi)) => {
                    let mut rows = Vec::new();
                    for xv in sweep(lo, hi, steps) {
                        let g = queue_loss_exponent(&cfg.params, xv, t, window)?;
                        rows.push(vec![fmt_f64(xv), fmt_f64(g.value)]);
                    }
                    hawkes_ldp::csv::table("x,G", &rows)
                }
                (Some(x), Some(t), None, None, None, None) => {
                    let g = queue_loss_exponent(&cfg.params, x, t, window)?;
                    hawkes_ldp::csv::table("x,G", &[vec![fmt_f64(x), fmt_f64(g.value)]])
                }
                _ => {
                    return Err(CliError::Usage(
                        "queue needs --x with --t-min/--t-max, or --horizon with --x-min/--x-max, or --x with --horizon"
                            .to_string(),
                    ))
                }
            };
            write_out(&cfg.output, &csv)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Simulate {
            common,
            z0,
            horizon,
        } => {
            let cfg = common.resolve(config)?;
            require_positive("--horizon", horizon)?;
            let spec = SimSpec::new(z0, horizon, cfg.seed)?;
            let path = simulate(&cfg.params, &spec);
            write_out(&cfg.output, &path.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Validate {
            common,
            z0,
            horizon,
            thetas,
        } => {
            let cfg = common.resolve(config)?;
            require_positive("--horizon", horizon)?;
            if thetas.is_empty() {
                return Err(CliError::Usage("validate needs at least one θ".to_string()));
            }
            let spec = SimSpec::new(z0, horizon, cfg.seed)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for &theta in &thetas {
                for quantity in ["Z", "N"] {
                    let ode = match quantity {
                        "Z" => log_mgf_z(&cfg.params, z0, theta, horizon),
                        _ => log_mgf_n(&cfg.params, z0, theta, horizon),
                    };
                    match ode.finite() {
                        None => {
                            // past the explosion boundary: flagged and
                            // excluded from the exit criterion
                            rows.push(vec![
                                quantity.to_string(),
                                fmt_f64(theta),
                                String::new(),
                                String::new(),
                                "infinite MGF".to_string(),
                                String::new(),
                            ]);
                        }
                        Some(ode_value) => {
                            let est = match quantity {
                                "Z" => mc_log_mgf_z(&cfg.params, &spec, theta, cfg.trials)?,
                                _ => mc_log_mgf_n(&cfg.params, &spec, theta, cfg.trials)?,
                            };
                            let z_score = if est.std_error == 0.0 {
                                if est.value == ode_value {
                                    0.0
                                } else {
                                    f64::INFINITY
                                }
                            } else {
                                (est.value - ode_value) / est.std_error
                            };
                            all_ok &= z_score.abs() <= 4.0;
                            rows.push(vec![
                                quantity.to_string(),
                                fmt_f64(theta),
                                fmt_f64(est.value),
                                fmt_f64(est.std_error),
                                fmt_f64(ode_value),
                                fmt_f64(z_score),
                            ]);
                        }
                    }
                }
            }
            write_out(
                &cfg.output,
                &hawkes_ldp::csv::table(
                    "quantity,theta,mc_log_mgf,std_error,ode_log_mgf,z_score",
                    &rows,
                ),
            )?;
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }

        Command::Regime {
            common,
            horizon,
            x_min,
            x_max,
            steps,
            lambda_output,
        } => {
            let cfg = common.resolve(config)?;
            require_positive("--horizon", horizon)?;
            let class = classify(&cfg.params);
            let alpha = cfg.params.alpha();
            let xs = sweep(x_min, x_max, steps);
            let mut out = String::new();
            match class.regime {
                Regime::Critical => {
                    let rows: Vec<Vec<String>> = xs
                        .iter()
                        .map(|&x| {
                            vec![
                                fmt_f64(x),
                                fmt_f64(critical_rate_z(alpha, x, horizon)),
                                fmt_f64(critical_rate_n(alpha, x, horizon)),
                            ]
                        })
                        .collect();
                    out.push_str(&hawkes_ldp::csv::table("x,rate_z,rate_n", &rows));
                    let pole =
                        std::f64::consts::PI.powi(2) / (2.0 * alpha * alpha * horizon * horizon);
                    let lam_rows: Vec<Vec<String>> = sweep(-2.0, 0.999 * pole, 97)
                        .into_iter()
                        .map(|theta| {
                            vec![
                                fmt_f64(theta),
                                fmt_f64(critical_lambda(alpha, theta, horizon)),
                            ]
                        })
                        .collect();
                    let lam_csv = hawkes_ldp::csv::table("theta,lambda", &lam_rows);
                    match &lambda_output {
                        Some(path) => write_out(&Some(path.clone()), &lam_csv)?,
                        None => {
                            out.push('\n');
                            out.push_str(&lam_csv);
                        }
                    }
                }
                Regime::Subcritical => {
                    let mu = cfg.params.mu();
                    let header = if mu > 0.0 { "x,rate,i0,i1" } else { "x,rate,i0" };
                    let mut rows = Vec::new();
                    for &x in &xs {
                        let mut row = vec![
                            fmt_f64(x),
                            fmt_f64(subcritical_rate(&cfg.params, x, horizon)?),
                            fmt_f64(subcritical_rate_i0(&cfg.params, x)?),
                        ];
                        if mu > 0.0 {
                            row.push(fmt_f64(subcritical_rate_i1(&cfg.params, x, horizon)?));
                        }
                        rows.push(row);
                    }
                    out.push_str(&hawkes_ldp::csv::table(header, &rows));
                }
                Regime::Supercritical => {
                    let lim = degenerate_limits(&cfg.params, class, horizon)?;
                    let rows = vec![
                        vec!["z_limit".to_string(), fmt_f64(lim.z_limit)],
                        vec!["n_limit".to_string(), fmt_f64(lim.n_limit.unwrap())],
                        vec!["log_time_rate".to_string(), fmt_f64(lim.log_time_rate)],
                        vec![
                            "z_scale_exponent".to_string(),
                            fmt_f64(lim.z_scale_exponent),
                        ],
                    ];
                    out.push_str(&hawkes_ldp::csv::table("constant,value", &rows));
                }
            }
            write_out(&cfg.output, &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Figures { common, out_dir } => {
            let cfg = common.resolve(config)?;
            figures::emit_all(&cfg, &out_dir)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
