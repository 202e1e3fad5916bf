//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error
//! (unreadable or malformed input), 4 numerical failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::decision::FinalAction;
use crate::error::{Error, Result};
use crate::io::{self, Mode, OcRun, RunConfig, Variant};
use crate::model::{ThresholdPrior, TrialData};
use crate::trial::{self, AnalysisMethod, SimulationSettings, TrialReport};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "basket-subgroup", version, about = "Bayesian subgroup analysis and simulation for basket trials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Final analysis of a patient dataset: actions, interval indices and thresholds.
    Analyze(DataArgs),
    /// Interim analysis of a patient dataset: stop, enroll all-comers or enroll biomarker-positive.
    Interim(DataArgs),
    /// Simulate builtin scenarios and write operating-characteristic tables.
    Simulate(SimulateArgs),
    /// Rebuild the CSV tables from an existing oc.json and print the decision table.
    OcReport(ReportArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file; every key is optional.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Random seed (at most 2^63 - 1).
    #[arg(long, env = "BASKET_SUBGROUP_SEED", value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    /// Model variant.
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    /// Use a half-Cauchy prior with this scale for the threshold spread.
    #[arg(long, value_name = "X")]
    gamma: Option<f64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DataArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Patient CSV with header `indication,biomarker,response`.
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Scenario: all, base, zero, spread, <set>-<1..6>, or <1..6> for base-<n>.
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
    /// Simulated trials per scenario and variant.
    #[arg(long, value_name = "N")]
    reps: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory containing oc.json; tables are rewritten there.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a, Mode::Analyze),
        Command::Interim(a) => cmd_analyze(a, Mode::Interim),
        Command::Simulate(a) => cmd_simulate(a),
        Command::OcReport(a) => cmd_oc_report(&a.out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        Error::Data(_) | Error::Parse { .. } | Error::Io { .. } | Error::NonFinite { .. } => EXIT_DATA,
        Error::Numerical(_) | Error::InfeasibleIndices { .. } | Error::NoSubgroup(_) => EXIT_NUMERICAL,
    }
}

fn resolve(common: &CommonArgs, mode: Mode) -> Result<RunConfig> {
    let mut config = match &common.config {
        // a broken config file is a usage problem, whatever the cause
        Some(path) => io::parse_config(path).map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })?,
        None => RunConfig::default(),
    };
    config.mode = mode;
    if let Some(seed) = common.seed {
        config.sampler.seed = seed;
    }
    if let Some(v) = common.variant {
        config.variant = Some(v);
    }
    if let Some(gamma) = common.gamma {
        config.priors.threshold = ThresholdPrior::HalfCauchy { gamma };
    }
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    Ok(config)
}

fn cmd_analyze(args: DataArgs, mode: Mode) -> Result<()> {
    let mut config = resolve(&args.common, mode)?;
    if let Some(d) = args.data {
        config.data = Some(d);
    }
    let variant = config.variant.unwrap_or(Variant::Simba);
    if variant == Variant::TwoStep {
        if mode == Mode::Interim {
            return Err(Error::Config("the two-step variant applies to final analyses only".into()));
        }
        config.mode = Mode::TwoStep;
    }
    config.validate()?;
    let path = config
        .data
        .clone()
        .ok_or_else(|| Error::Config("no dataset given; use --data or the `data` config key".into()))?;
    let data = io::parse_dataset(&path)?;
    let (priors, decision) = config.for_variant(variant);
    decision.validate(data.len())?;

    eprintln!("fitting {} indications from {} ({} variant)", data.len(), path.display(), variant.as_str());
    if mode == Mode::Interim {
        let report = trial::interim_analysis(&data, &priors, &config.sampler, &decision)?;
        io::write_interim_report(&report, &config.out)?;
        io::write_effective_config(&config, &config.out)?;
        println!("{:<16} {:>4} {:>7} {:>3} {:>3} {:>3} {:>7} {:>8}", "indication", "n", "action", "a", "a+", "a-", "P(M2)", "t_hat");
        for d in &report.indications {
            println!(
                "{:<16} {:>4} {:>7} {:>3} {:>3} {:>3} {:>7.3} {:>8}",
                d.label,
                d.n_enrolled,
                d.action.as_str(),
                d.intervals.a,
                d.intervals.a_plus,
                d.intervals.a_minus,
                d.prob_m2,
                d.threshold.map_or_else(|| "none".to_string(), |t| format!("{:.3}", t.t_hat)),
            );
        }
    } else {
        let method = if variant == Variant::TwoStep { AnalysisMethod::TwoStep } else { AnalysisMethod::OneStep };
        let report = trial::analyze_with(method, &data, &priors, &config.sampler, &decision)?;
        io::write_report(&report, &config.out)?;
        io::write_effective_config(&config, &config.out)?;
        print_final(&report, &data);
    }
    eprintln!("wrote results to {}", config.out.display());
    Ok(())
}

fn print_final(report: &TrialReport, data: &TrialData) {
    println!(
        "{:<16} {:>4} {:>6} {:>3} {:>3} {:>3} {:>7} {:>8} {:>4} {:>5}",
        "indication", "n", "action", "a", "a+", "a-", "P(M2)", "t_hat", "OBS", "flag"
    );
    for (r, ind) in report.indications.iter().zip(&data.indications) {
        let (t, obs) = match r.threshold {
            Some(t) => (format!("{:.3}", t.t_hat), t.obs_size.to_string()),
            None => ("none".to_string(), ind.patients.len().to_string()),
        };
        println!(
            "{:<16} {:>4} {:>6} {:>3} {:>3} {:>3} {:>7.3} {:>8} {:>4} {:>5}",
            r.label,
            r.n_enrolled,
            r.final_action.as_str(),
            r.intervals.a,
            r.intervals.a_plus,
            r.intervals.a_minus,
            r.prob_m2,
            t,
            obs,
            r.subgroup_flag
        );
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut config = resolve(&args.common, Mode::Simulate)?;
    if let Some(s) = args.scenario {
        config.scenario = s;
    }
    if let Some(r) = args.reps {
        config.reps = r;
    }
    if let Some(t) = args.threads {
        config.threads = Some(t);
    }
    config.validate()?;
    let scenarios = trial::select_scenarios(&config.scenario)?;
    let variants = match config.variant {
        Some(v) => vec![v],
        None => vec![Variant::Simba, Variant::Nb],
    };

    let mut runs = Vec::new();
    for scenario in &scenarios {
        for &variant in &variants {
            eprintln!("simulating {} ({}, {} trials)", scenario.label, variant.as_str(), config.reps);
            let (priors, decision) = config.for_variant(variant);
            let settings = SimulationSettings {
                priors,
                sampler: config.sampler,
                decision,
                method: if variant == Variant::TwoStep { AnalysisMethod::TwoStep } else { AnalysisMethod::OneStep },
            };
            let oc = trial::operating_characteristics(scenario, config.reps, &settings, config.sampler.seed, config.threads)?;
            runs.push(OcRun { variant, oc });
        }
    }
    io::write_oc_tables(&runs, &config.out)?;
    io::write_effective_config(&config, &config.out)?;
    print_oc(&runs);
    eprintln!("wrote results to {}", config.out.display());
    Ok(())
}

fn print_oc(runs: &[OcRun]) {
    println!(
        "{:<10} {:<9} {:<12} {:>4} {:>6} {:>6} {:>6} {:>6} {:>6}",
        "scenario", "variant", "indication", "best", "S", "INC", "RA", "RP", "flag"
    );
    for run in runs {
        for (ind, best) in run.oc.indications.iter().zip(&run.oc.optimal_actions) {
            let f = |a: FinalAction| ind.final_actions.get(a);
            println!(
                "{:<10} {:<9} {:<12} {:>4} {:>6.1} {:>6.1} {:>6.1} {:>6.1} {:>6.1}",
                run.oc.scenario.label,
                run.variant.as_str(),
                ind.label,
                best.as_str(),
                f(FinalAction::S),
                f(FinalAction::Inc),
                f(FinalAction::RA),
                f(FinalAction::RP),
                ind.subgroup_flag_rate
            );
        }
    }
}

fn cmd_oc_report(dir: &Path) -> Result<()> {
    let runs = io::read_oc(dir.join("oc.json"))?;
    io::write_oc_tables(&runs, dir)?;
    print_oc(&runs);
    Ok(())
}
