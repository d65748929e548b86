//! `beamselect`: bound constants, single-trial selections, and Monte Carlo
//! sweeps for opportunistic collaborative beamforming.

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use beamselect::bounds::to_db;
use beamselect::experiments::{default_trials, DEFAULT_SWEEP_EXHAUSTIVE_CAP};
use beamselect::selection::DEFAULT_EXHAUSTIVE_CAP;
use beamselect::{
    bound_constants, centralized_feedback, distributed_select, run_algorithm, run_sweep,
    sample_channel, Algorithm, Error, RngSeed, SweepConfig, SweepResult, Thresholds,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::output::{fmt_sig, records, write_csv, write_json, write_key_values_csv};

const THREADS_ENV: &str = "BEAMSELECT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "beamselect", version, about = "Opportunistic collaborative beamforming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the optimized thresholds and large-K bound constants.
    Bounds {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run one selection rule on one seeded channel realization.
    Trial {
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Greedy)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        exhaustive_cap: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Monte Carlo sweep over K; one output row per (algorithm, K).
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        /// Trials per K (default: 10^4 up to K = 100, 10^3 up to 1000, 10^2 beyond).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',',
              default_values_t = [AlgorithmArg::Exhaustive, AlgorithmArg::Greedy, AlgorithmArg::Sector,
                                  AlgorithmArg::UpperBound, AlgorithmArg::SingleBest])]
        algorithms: Vec<AlgorithmArg>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(long, default_value_t = DEFAULT_SWEEP_EXHAUSTIVE_CAP)]
        exhaustive_cap: usize,
    },
}

#[derive(clap::Args, Debug)]
struct ThresholdArgs {
    /// Amplitude threshold (default r*).
    #[arg(long)]
    r: Option<f64>,
    /// Sector half-angle in radians (default α*).
    #[arg(long)]
    alpha: Option<f64>,
}

impl ThresholdArgs {
    fn resolve(&self) -> Thresholds {
        let defaults = Thresholds::default();
        Thresholds {
            r: self.r.unwrap_or(defaults.r),
            alpha: self.alpha.unwrap_or(defaults.alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum AlgorithmArg {
    Exhaustive,
    Greedy,
    Sector,
    UpperBound,
    SingleBest,
    Distributed,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(arg: AlgorithmArg) -> Self {
        match arg {
            AlgorithmArg::Exhaustive => Algorithm::Exhaustive,
            AlgorithmArg::Greedy => Algorithm::Greedy,
            AlgorithmArg::Sector => Algorithm::Sector,
            AlgorithmArg::UpperBound => Algorithm::UpperBound,
            AlgorithmArg::SingleBest => Algorithm::SingleBest,
            AlgorithmArg::Distributed => Algorithm::Distributed,
        }
    }
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
enum CliError {
    Selection(Error),
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Selection(Error::ComplexityGuard { .. }) => 3,
            CliError::Selection(Error::InvalidArgument(_)) => 2,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Selection(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Selection(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds { format } => cmd_bounds(format),
        Command::Trial {
            k,
            seed,
            algorithm,
            thresholds,
            exhaustive_cap,
            format,
        } => cmd_trial(k, seed, algorithm.into(), thresholds.resolve(), exhaustive_cap, format),
        Command::Sweep {
            k_list,
            trials,
            seed,
            algorithms,
            format,
            out,
            thresholds,
            exhaustive_cap,
        } => {
            let algorithms = algorithms.into_iter().map(Algorithm::from).collect();
            threads_from_env().and_then(|threads| {
                cmd_sweep(SweepArgs {
                    k_list,
                    trials,
                    seed,
                    algorithms,
                    format,
                    out,
                    thresholds: thresholds.resolve(),
                    exhaustive_cap,
                    threads,
                })
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got '{v}'")).into()
            }),
        _ => Ok(None),
    }
}

fn print_pairs(pairs: &[(&str, String)], format: Option<Format>) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Some(Format::Csv) => write_key_values_csv(&mut out, pairs)?,
        _ => {
            for (key, value) in pairs {
                writeln!(out, "{key}: {value}")?;
            }
        }
    }
    Ok(())
}

fn cmd_bounds(format: Option<Format>) -> Result<(), CliError> {
    let c = bound_constants();
    if format == Some(Format::Json) {
        println!("{}", serde_json::to_string_pretty(&c).expect("constants serialize"));
        return Ok(());
    }
    let pairs = [
        ("r_star", fmt_sig(c.r_star)),
        ("alpha_star", fmt_sig(c.alpha_star)),
        ("f_max", fmt_sig(c.f_max)),
        ("upper_c", fmt_sig(c.upper_c)),
        ("lower_c", fmt_sig(c.lower_c)),
        ("gap_db", fmt_sig(c.gap_db)),
        ("fraction_ub", fmt_sig(c.fraction_ub)),
    ];
    print_pairs(&pairs, format)
}

fn cmd_trial(
    k: usize,
    seed: u64,
    algorithm: Algorithm,
    thresholds: Thresholds,
    exhaustive_cap: usize,
    format: Option<Format>,
) -> Result<(), CliError> {
    let h = sample_channel(k, RngSeed::new(seed, 0))?;
    let outcome = run_algorithm(algorithm, &h, thresholds, exhaustive_cap)?;
    let budget = match algorithm {
        Algorithm::Distributed => distributed_select(&h, thresholds.r, thresholds.alpha)?.1,
        _ => centralized_feedback(&outcome.selected),
    };
    let best_single = h.gains()[h.strongest()].power();
    let selected: Vec<usize> = outcome.indices().iter().map(|i| i + 1).collect();
    let gain_db = if best_single > 0.0 {
        to_db(outcome.power / best_single)
    } else {
        0.0
    };

    if format == Some(Format::Json) {
        let channel: Vec<_> = h
            .iter()
            .map(|g| json!({ "amplitude": g.amplitude(), "phase": g.phase() }))
            .collect();
        let doc = json!({
            "algorithm": algorithm.name(),
            "k": k,
            "seed": seed,
            "selected": selected,
            "power": outcome.power,
            "power_over_k": outcome.power / k as f64,
            "gain_over_single_best_db": gain_db,
            "composite": { "re": outcome.composite.re, "im": outcome.composite.im },
            "iterations": outcome.iterations,
            "trace": outcome.trace,
            "feedback": budget,
            "channel": channel,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("trial serializes"));
        return Ok(());
    }

    let join = |values: Vec<String>| values.join(" ");
    let mut pairs = vec![
        ("algorithm", algorithm.name().to_string()),
        ("k", k.to_string()),
        ("seed", seed.to_string()),
        ("selected", join(selected.iter().map(ToString::to_string).collect())),
        ("power", fmt_sig(outcome.power)),
        ("power_over_k", fmt_sig(outcome.power / k as f64)),
        ("gain_over_single_best_db", fmt_sig(gain_db)),
        ("iterations", outcome.iterations.to_string()),
    ];
    if algorithm == Algorithm::Greedy {
        pairs.push(("trace", join(outcome.trace.iter().map(|&p| fmt_sig(p)).collect())));
    }
    pairs.push(("feedback_bits", budget.bits_sent.to_string()));
    pairs.push(("feedback_rounds", budget.rounds.to_string()));
    pairs.push(("broadcasts", budget.broadcasts.to_string()));
    print_pairs(&pairs, format)
}

struct SweepArgs {
    k_list: Vec<usize>,
    trials: Option<usize>,
    seed: u64,
    algorithms: Vec<Algorithm>,
    format: Format,
    out: Option<PathBuf>,
    thresholds: Thresholds,
    exhaustive_cap: usize,
    threads: Option<usize>,
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let config_for = |k_values: Vec<usize>, trials: usize| {
        let mut config = SweepConfig::new(k_values, trials, args.seed)
            .with_algorithms(args.algorithms.clone())
            .with_threads(args.threads);
        config.exhaustive_k_cap = args.exhaustive_cap;
        config.thresholds = args.thresholds;
        config
    };

    let result = match args.trials {
        Some(trials) => run_sweep(&config_for(args.k_list.clone(), trials))?,
        None => {
            config_for(args.k_list.clone(), 1).validate()?;
            let mut merged = SweepResult {
                cells: Vec::new(),
                skipped: Vec::new(),
                dominance_violations: 0,
            };
            for &k in &args.k_list {
                let part = run_sweep(&config_for(vec![k], default_trials(k)))?;
                merged.cells.extend(part.cells);
                merged.skipped.extend(part.skipped);
                merged.dominance_violations += part.dominance_violations;
            }
            let rank = |a: Algorithm| args.algorithms.iter().position(|&x| x == a);
            merged.cells.sort_by_key(|c| (rank(c.algorithm), c.k));
            merged
        }
    };

    for (algorithm, k) in &result.skipped {
        eprintln!(
            "note: skipped {algorithm} at K = {k} (above exhaustive cap {})",
            args.exhaustive_cap
        );
    }
    if result.dominance_violations > 0 {
        eprintln!(
            "warning: {} trials violated exhaustive >= greedy >= single_best",
            result.dominance_violations
        );
    }

    let rows = records(&result);
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display()))
            })?;
            let mut writer = BufWriter::new(file);
            emit(&mut writer, &rows, args.format)?;
            writer.flush()?;
        }
        None => {
            let stdout = io::stdout();
            emit(stdout.lock(), &rows, args.format)?;
        }
    }
    Ok(())
}

fn emit<W: Write>(out: W, rows: &[output::OutputRecord], format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(out, rows)?,
        Format::Json => write_json(out, rows)?,
    }
    Ok(())
}
