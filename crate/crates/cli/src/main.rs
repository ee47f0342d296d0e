use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use persuasion::continuous::{self, StateDistribution};
use persuasion::dynamic::{self, brake_residual};
use persuasion::policy::InformationPolicy;
use persuasion::{gradual, mpe, statics, Error, Params};
use persuasion_oracle::{lp_oracle, monte_carlo, GridSpec};
use serde_json::json;

mod config;

use config::{load_params, ConfigError};

#[derive(Parser, Debug)]
#[command(name = "persuade", version, about = "Solve and check disclosure policies for an experimenting agent")]
struct Cli {
    /// Parameter file, or inline JSON starting with '{'. Defaults to the
    /// built-in baseline.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Override the quality prior.
    #[arg(long, global = true)]
    mu0: Option<f64>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Grid size (time grid for the oracle, state grid for `continuous`).
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, default_value_t = 100_000)]
    paths: u64,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Prior grid as LO:HI:N.
    #[arg(long = "mu0-range", global = true)]
    mu0_range: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the parameters and print the belief thresholds.
    Validate,
    /// Optimal disclosure at time zero only.
    SolveStatic,
    /// Optimal commitment policy (equal discount rates).
    SolveDynamic,
    /// Solve over a grid of priors.
    Sweep,
    /// Hybrid accelerator for unequal discount rates.
    Gradual,
    /// Equilibrium without commitment and the value of commitment.
    NoCommitment,
    /// Continuum of qualities.
    Continuous {
        /// JSON file with grid, weights and payoff_map.
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Compare the commitment solver with the discretised LP.
    Oracle {
        /// Largest acceptable relative gap.
        #[arg(long, default_value_t = 0.01)]
        gap_bound: f64,
    },
    /// Simulate paths under a policy.
    Simulate {
        #[arg(long, value_enum, default_value_t = PolicyChoice::Dynamic)]
        policy: PolicyChoice,
        /// Policy JSON as written by `solve-dynamic`, overrides --policy.
        #[arg(long)]
        policy_file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyChoice {
    NoDisclosure,
    Dynamic,
    Mpe,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure { code: 2, msg: e.to_string() }
    }
}

fn solver(module: &str, e: Error) -> Failure {
    let code = match e {
        Error::InvalidParams(_) | Error::AssumptionViolated(_) => 2,
        Error::Tolerance(_) => 4,
        _ => 3,
    };
    Failure { code, msg: format!("[{module}] {e}") }
}

fn io(e: anyhow::Error) -> Failure {
    Failure { code: 1, msg: format!("{e:#}") }
}

struct Output {
    json: serde_json::Value,
    csv: Option<String>,
    summary: String,
    /// Exit code after writing, for tolerance failures that still produce
    /// output.
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let mut params = load_params(cli.config.as_deref())?;
    if let Some(m) = cli.mu0 {
        params.mu0 = m;
    }
    config::check(&params)?;
    let out = dispatch(cli, &params)?;
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serialisable") + "\n",
        Format::Csv => out.csv.clone().ok_or_else(|| Failure { code: 2, msg: "no csv output for this command".into() })?,
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(io)?,
        None => print!("{text}"),
    }
    eprintln!("{}", out.summary);
    Ok(out.code)
}

fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure { code: 2, msg: format!("--mu0-range expects LO:HI:N, got {s}") };
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n < 2 || !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(bad());
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn dispatch(cli: &Cli, params: &Params) -> Result<Output, Failure> {
    match &cli.command {
        Command::Validate => {
            let th = statics::shape_thresholds(params).map_err(|e| solver("static", e))?;
            Ok(Output {
                json: json!({ "params": params, "thresholds": th, "t_star": params.peak_time(), "tau_1": params.stop_time(1.0) }),
                csv: None,
                summary: format!("valid: mu* = {:.6}, t* = {:.6}", th.mu_star, params.peak_time()),
                code: 0,
            })
        }
        Command::SolveStatic => {
            let bounds = statics::concavify_bounds(params).map_err(|e| solver("static", e))?;
            let signal = statics::optimal_static_signal(params).map_err(|e| solver("static", e))?;
            let csv = statics::value_curve_csv(params, cli.grid.unwrap_or(100)).map_err(|e| solver("static", e))?;
            Ok(Output {
                summary: format!("static: value {:.9}, mu_L = {:.6}, mu_H = {:.6}", signal.value, bounds.mu_l, bounds.mu_h),
                json: json!({ "params": params, "bounds": bounds, "signal": signal }),
                csv: Some(csv),
                code: 0,
            })
        }
        Command::SolveDynamic => {
            let s = dynamic::solve_dynamic(params).map_err(|e| solver("dynamic", e))?;
            let policy = s.policy(params).map_err(|e| solver("dynamic", e))?;
            let brake = if s.x_a > 0.0 { brake_residual(params, s.x_a, s.x_b, s.t_a).abs() } else { 0.0 };
            let participation = s.participation_slack;
            let below = params.mu0 < params.alignment_belief().map_err(|e| solver("dynamic", e))?;
            let ok = brake <= 1e-8 && if below { participation.abs() <= 1e-8 } else { participation >= -1e-8 };
            Ok(Output {
                summary: format!(
                    "dynamic: {:?}, payoff {:.9}, brake residual {:.2e}, participation {:.2e}",
                    s.regime, s.payoff, brake, participation
                ),
                json: json!({
                    "params": params,
                    "solution": s,
                    "residuals": { "brake": brake, "participation": participation },
                    "commitment": s.commitment(params),
                    "policy": policy,
                }),
                csv: Some(policy.cdf_csv(params, cli.grid.unwrap_or(200))),
                code: if ok { 0 } else { 4 },
            })
        }
        Command::Sweep => {
            let priors = match &cli.mu0_range {
                Some(r) => parse_range(r)?,
                None => {
                    let th = statics::shape_thresholds(params).map_err(|e| solver("sweep", e))?;
                    let (lo, hi) = (th.mu_bar0 + 1e-3, 1.0 - 1e-3);
                    (0..100).map(|i| lo + (hi - lo) * i as f64 / 99.0).collect()
                }
            };
            let rows = dynamic::comparative_sweep(params, &priors);
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            Ok(Output {
                summary: format!("sweep: {} priors, {} failed", rows.len(), failed),
                csv: Some(dynamic::sweep_csv(&rows)),
                json: json!({ "params": params, "rows": rows }),
                code: if failed > 0 { 3 } else { 0 },
            })
        }
        Command::Gradual => {
            let h = gradual::solve_hybrid(params).map_err(|e| solver("gradual", e))?;
            Ok(Output {
                summary: format!(
                    "gradual: payoff {:.9} (two-point {:.9}), span [{:.6}, {:.6}]",
                    h.payoff, h.two_point_payoff, h.accelerator.span_start, h.accelerator.span_end
                ),
                csv: Some(h.policy.cdf_csv(params, cli.grid.unwrap_or(200))),
                json: json!({ "params": params, "solution": h }),
                code: 0,
            })
        }
        Command::NoCommitment => {
            let m = mpe::mpe_policy(params).map_err(|e| solver("no-commitment", e))?;
            let gap = if params.equal_rates() {
                Some(mpe::commitment_gap(params).map_err(|e| solver("no-commitment", e))?)
            } else {
                None
            };
            let report = m.policy.check(params, 512);
            Ok(Output {
                summary: format!("no-commitment: payoff {:.9}, commitment gap {:?}", m.payoff, gap),
                csv: Some(m.policy.cdf_csv(params, cli.grid.unwrap_or(200))),
                json: json!({ "params": params, "solution": m, "commitment_gap": gap, "report": report }),
                code: if report.holds(1e-8, 1e-9) { 0 } else { 4 },
            })
        }
        Command::Continuous { states } => {
            let g = match states {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())).map_err(io)?;
                    serde_json::from_str::<StateDistribution>(&text)
                        .map_err(|e| Failure { code: 2, msg: format!("[continuous] bad state file: {e}") })?
                }
                None => StateDistribution::uniform(params, cli.grid.unwrap_or(257)),
            };
            let c = continuous::solve_continuous(params, &g).map_err(|e| solver("continuous", e))?;
            let ok = c.binding_residual.abs() <= 1e-6;
            Ok(Output {
                summary: format!(
                    "continuous: payoff {:.9}, kappa {:.6}, pool stop {:.6}, binding residual {:.2e}",
                    c.payoff, c.kappa, c.pool_stop, c.binding_residual
                ),
                csv: Some(continuous::schedule_csv(params, &g, &c)),
                json: json!({ "params": params, "solution": c }),
                code: if ok { 0 } else { 4 },
            })
        }
        Command::Oracle { gap_bound } => {
            let n = cli.grid.unwrap_or(200);
            let lp = lp_oracle(params, &GridSpec::new(n)).map_err(|e| Failure { code: 3, msg: format!("[oracle] {e}") })?;
            let s = dynamic::solve_dynamic(params).map_err(|e| solver("dynamic", e))?;
            let gap = (s.payoff - lp.value).abs() / s.payoff.abs();
            eprintln!("gap: lp {:.9} solver {:.9} relative {:.3e}", lp.value, s.payoff, gap);
            Ok(Output {
                summary: format!("oracle: n = {n}, relative gap {gap:.3e} (bound {gap_bound})"),
                csv: None,
                json: json!({ "params": params, "lp": lp, "solver_payoff": s.payoff, "relative_gap": gap }),
                code: if gap <= *gap_bound { 0 } else { 4 },
            })
        }
        Command::Simulate { policy, policy_file } => {
            let pol: InformationPolicy = match policy_file {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())).map_err(io)?;
                    let v: serde_json::Value = serde_json::from_str(&text)
                        .map_err(|e| Failure { code: 2, msg: format!("[simulate] bad policy file: {e}") })?;
                    // accept a bare policy or the output of solve-dynamic
                    let inner = v.get("policy").cloned().unwrap_or(v);
                    serde_json::from_value(inner)
                        .map_err(|e| Failure { code: 2, msg: format!("[simulate] bad policy file: {e}") })?
                }
                None => match policy {
                    PolicyChoice::NoDisclosure => InformationPolicy::no_disclosure(params),
                    PolicyChoice::Dynamic => dynamic::solve_dynamic(params)
                        .and_then(|s| s.policy(params))
                        .map_err(|e| solver("dynamic", e))?,
                    PolicyChoice::Mpe => mpe::mpe_policy(params).map_err(|e| solver("no-commitment", e))?.policy,
                },
            };
            pol.validate(params).map_err(|e| solver("simulate", e))?;
            let r = monte_carlo(&pol, params, cli.paths, cli.seed);
            let quad = (pol.principal_value(params), pol.agent_value(params));
            Ok(Output {
                summary: format!(
                    "simulate: principal {:.6} +/- {:.1e} (quadrature {:.6}), agent {:.6} +/- {:.1e} (quadrature {:.6})",
                    r.principal_mean, r.principal_se, quad.0, r.agent_mean, r.agent_se, quad.1
                ),
                csv: None,
                json: json!({ "params": params, "result": r, "quadrature": { "principal": quad.0, "agent": quad.1 } }),
                code: 0,
            })
        }
    }
}
