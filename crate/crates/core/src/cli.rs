//! `lis-assign` command line.
//!
//! Values come from flags, then the config file, then built-in defaults, in
//! that order of precedence. Exit codes: 0 success, 1 usage, 2 invalid
//! input, 3 runtime failure (I/O, broken internal contract).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::assign::{
    brute_force_assign, build_cost_matrix, build_cost_matrix_center, objective_value, solve_lbap, solve_lsap, Objective,
    RateTable,
};
use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::experiments::{emit_csv, emit_sir_csv, manifest_path, run_rate_sweep, run_sir_study, write_json, Manifest};
use crate::field::{coupling_tensor, QuadratureSpec};
use crate::scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lis-assign", version, about = "User-to-unit assignment for distributed LIS systems")]
struct Cli {
    /// Worker threads [default: available cores]
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interference-to-signal CDF for two random users in front of one unit.
    Sir(SirArgs),
    /// Assign the users of one scenario to units.
    Assign(AssignArgs),
    /// Monte Carlo rate sweep over unit side or transmit power.
    Sweep(SweepArgs),
}

/// Quadrature overrides; unset flags keep the file value or the default.
#[derive(Debug, Args)]
struct QuadArgs {
    /// Base panel side as a fraction of the wavelength [default: 0.5]
    #[arg(long)]
    panel_fraction: Option<f64>,
    /// Gauss-Legendre nodes per panel and axis [default: 4]
    #[arg(long)]
    nodes: Option<usize>,
    /// Relative refinement tolerance [default: 1e-8]
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Maximum refinement depth below a base panel [default: 12]
    #[arg(long)]
    max_depth: Option<u32>,
}

impl QuadArgs {
    fn apply(&self, mut q: QuadratureSpec) -> Result<QuadratureSpec> {
        q.panel_fraction = self.panel_fraction.unwrap_or(q.panel_fraction);
        q.nodes_per_panel = self.nodes.unwrap_or(q.nodes_per_panel);
        q.rel_tol = self.rel_tol.unwrap_or(q.rel_tol);
        q.max_depth = self.max_depth.unwrap_or(q.max_depth);
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Args)]
struct SirArgs {
    /// Unit side length, m
    #[arg(long, default_value_t = 0.5)]
    side: f64,
    /// Wavelength, m
    #[arg(long, default_value_t = 0.125)]
    lambda: f64,
    /// Number of random two-user placements
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// RNG seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Report the fraction of samples at or below this level, dB
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    threshold_db: f64,
    /// CSV of sorted samples and their empirical CDF; a manifest is written next to it
    #[arg(long, default_value = "sir.csv")]
    out: PathBuf,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AssignMethod {
    /// Kuhn-Munkres on the RSS cost matrix
    Lsap,
    /// Threshold algorithm on the RSS cost matrix
    Lbap,
    /// Exhaustive search on the chosen objective
    Brute,
    /// LSAP (sum objectives) or LBAP (min objectives) on center-point RSS estimates
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ObjectiveArg {
    SumRate,
    MinRate,
    SumRss,
    MinRss,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::SumRate => Objective::SumRate,
            ObjectiveArg::MinRate => Objective::MinRate,
            ObjectiveArg::SumRss => Objective::SumRss,
            ObjectiveArg::MinRss => Objective::MinRss,
        }
    }
}

#[derive(Debug, Args)]
struct AssignArgs {
    /// Scenario config file (TOML); built-in defaults when omitted
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Objective to report (and to maximize with --method brute)
    #[arg(long, value_enum, default_value_t = ObjectiveArg::SumRate)]
    objective: ObjectiveArg,
    /// Assignment method
    #[arg(long, value_enum, default_value_t = AssignMethod::Lsap)]
    method: AssignMethod,
    /// JSON result record
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed for sampled users; overrides the file [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Largest number of assignments --method brute may enumerate [default: 10000000]
    #[arg(long)]
    cap: Option<u64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep config file (TOML); built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV of per-point means; a manifest is written next to it
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    /// Trials per grid point; overrides the file [default: 2000]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    /// RNG seed; overrides the file [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    quad: QuadArgs,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::EnumerationCap { .. } => EXIT_INVALID,
        Error::Contract(_) | Error::Io { .. } => EXIT_RUNTIME,
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::Config(format!("cannot start {n} workers: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Sir(a) => cmd_sir(a),
        Command::Assign(a) => cmd_assign(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn load(path: Option<&Path>) -> Result<ConfigFile> {
    path.map_or_else(|| Ok(ConfigFile::default()), ConfigFile::load)
}

#[derive(Serialize)]
struct SirEcho {
    side: f64,
    lambda: f64,
    trials: u64,
    threshold_db: f64,
    quad: QuadratureSpec,
}

fn cmd_sir(a: &SirArgs) -> Result<()> {
    let quad = a.quad.apply(QuadratureSpec::default())?;
    let study = run_sir_study(a.side, a.lambda, a.trials as usize, a.seed, &quad)?;
    emit_sir_csv(&study, &a.out)?;
    let echo = SirEcho {
        side: a.side,
        lambda: a.lambda,
        trials: a.trials,
        threshold_db: a.threshold_db,
        quad,
    };
    write_json(&Manifest::new("sir", a.seed, echo), &manifest_path(&a.out))?;
    println!("fraction at or below {} dB: {}", a.threshold_db, study.cdf(a.threshold_db));
    println!("median 1/SIR: {} dB", study.quantile(0.5));
    Ok(())
}

#[derive(Serialize)]
struct AssignRecord<'a> {
    method: &'static str,
    objective: &'static str,
    value: f64,
    mapping: &'a [usize],
    user_rates: Vec<f64>,
    user_rss: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluated: Option<u128>,
    accuracy_warnings: usize,
    scenario: &'a Scenario,
}

fn method_name(m: AssignMethod) -> &'static str {
    match m {
        AssignMethod::Lsap => "lsap",
        AssignMethod::Lbap => "lbap",
        AssignMethod::Brute => "brute",
        AssignMethod::Center => "center",
    }
}

fn cmd_assign(a: &AssignArgs) -> Result<()> {
    let mut file = load(a.scenario.as_deref())?;
    file.seed = a.seed.or(file.seed);
    file.enumeration_cap = a.cap.or(file.enumeration_cap);
    let quad = a.quad.apply(file.quadrature()?)?;
    let scenario = file.scenario()?;
    let tensor = coupling_tensor(&scenario, &quad)?;
    let powers = scenario.powers();
    let rates = RateTable::new(&tensor, scenario.noise_density, &powers)?;
    let objective = Objective::from(a.objective);
    let sum_like = matches!(objective, Objective::SumRate | Objective::SumRss);
    let mut evaluated = None;
    let mapping = match a.method {
        AssignMethod::Lsap => solve_lsap(&build_cost_matrix(&tensor)?)?.mapping,
        AssignMethod::Lbap => solve_lbap(&build_cost_matrix(&tensor)?)?.mapping,
        AssignMethod::Center => {
            let cost = build_cost_matrix_center(&scenario)?;
            if sum_like { solve_lsap(&cost)? } else { solve_lbap(&cost)? }.mapping
        }
        AssignMethod::Brute => {
            let cap = file.enumeration_cap.map_or(crate::assign::DEFAULT_ENUMERATION_CAP, u128::from);
            let best = brute_force_assign(&tensor, objective, scenario.noise_density, &powers, cap)?;
            evaluated = Some(best.evaluated);
            best.assignment.mapping
        }
    };
    let value = objective_value(objective, &mapping, &rates, &tensor)?;
    let user_rates = rates.rates_for(&mapping);
    let user_rss: Vec<f64> = mapping.iter().enumerate().map(|(k, &m)| tensor.rss(m, k)).collect();

    println!("method: {}", method_name(a.method));
    for (k, &m) in mapping.iter().enumerate() {
        println!("user {k} -> unit {m}  rate {} bit/s/Hz  rss {}", user_rates[k], user_rss[k]);
    }
    println!("{}: {value}", objective.name());
    if let Some(n) = evaluated {
        println!("evaluated assignments: {n}");
    }
    if !tensor.warnings.is_empty() {
        eprintln!("warning: quadrature tolerance not met on units {:?}", tensor.warnings);
    }
    if let Some(out) = &a.out {
        let record = AssignRecord {
            method: method_name(a.method),
            objective: objective.name(),
            value,
            mapping: &mapping,
            user_rates,
            user_rss,
            evaluated,
            accuracy_warnings: tensor.warnings.len(),
            scenario: &scenario,
        };
        write_json(&record, out)?;
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let mut file = load(a.config.as_deref())?;
    file.seed = a.seed.or(file.seed);
    file.trials = a.trials.map(|t| t as usize).or(file.trials);
    let mut config = file.sweep_config()?;
    config.quad = a.quad.apply(config.quad)?;
    let result = run_rate_sweep(&config)?;
    emit_csv(&result, &a.out)?;
    write_json(&Manifest::new("sweep", config.seed, &config).with_sweep(&result), &manifest_path(&a.out))?;
    let failed = result.failed_count();
    println!(
        "{} grid points x {} trials -> {} ({} failed trials)",
        result.points.len(),
        result.trials,
        a.out.display(),
        failed
    );
    if failed > 0 {
        eprintln!("warning: {failed} trials failed; see the manifest");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["lis-assign", "sir", "--trials", "0"]), EXIT_USAGE);
        assert_eq!(run(["lis-assign", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["lis-assign"]), EXIT_USAGE);
        assert_eq!(run(["lis-assign", "assign", "--method", "greedy"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["lis-assign", "sweep", "--help"]), EXIT_OK);
    }

    #[test]
    fn missing_config_is_a_runtime_error() {
        assert_eq!(run(["lis-assign", "sweep", "--config", "/nonexistent/sweep.toml"]), EXIT_RUNTIME);
    }
}
