//! `sumfac`: times dense versus sum-factorized Hadamard products across 1D
//! sizes and fits log-log slopes.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 correctness-gate
//! failure, 3 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sumfac::bench::{emit_csv, run_benchmark, summary, BenchConfig, Method};
use sumfac::flux::entropy_survey;
use sumfac::Error;

const EXIT_INVALID: u8 = 1;
const EXIT_GATE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sumfac",
    version,
    about = "Dense vs sum-factorized Hadamard product benchmark"
)]
struct Cli {
    /// Spatial dimension.
    #[arg(long = "dim", default_value_t = 3)]
    dim: usize,

    /// Smallest 1D size.
    #[arg(long, default_value_t = 3)]
    n_min: usize,

    /// Largest 1D size.
    #[arg(long, default_value_t = 15)]
    n_max: usize,

    /// Timed repetitions per point.
    #[arg(long = "reps", default_value_t = 5)]
    reps: usize,

    /// Seed for the operand generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated subset of: dense, sumfac.
    #[arg(long, value_delimiter = ',', default_value = "dense,sumfac")]
    methods: Vec<String>,

    /// CSV output path.
    #[arg(long = "out")]
    out: Option<PathBuf>,

    /// Time sparsity-pattern construction along with assembly and evaluation.
    #[arg(long)]
    include_pattern: bool,

    /// Lower bound of the operand generator values.
    #[arg(long, default_value_t = 1e-8)]
    low: f64,

    /// Upper bound of the operand generator values.
    #[arg(long, default_value_t = 30.0)]
    high: f64,

    /// Run the Burgers entropy-conservation checks instead of the benchmark.
    #[arg(long)]
    demo_entropy: bool,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::CorrectnessGate(_) => EXIT_GATE,
        Error::Io { .. } | Error::Csv { .. } => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

fn config_from(cli: &Cli) -> Result<BenchConfig, Error> {
    let methods = cli
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<Result<Vec<_>, _>>()?;
    let config = BenchConfig {
        d: cli.dim,
        n_min: cli.n_min,
        n_max: cli.n_max,
        repetitions: cli.reps,
        seed: cli.seed,
        methods,
        output: cli.out.clone(),
        include_pattern: cli.include_pattern,
        low: cli.low,
        high: cli.high,
        ..BenchConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn run_benchmark_cli(cli: &Cli) -> Result<(), Error> {
    let config = config_from(cli)?;
    let report = run_benchmark(&config)?;
    for s in &report.skipped {
        eprintln!("warning: skipped {} at n={}: {}", s.method, s.n, s.reason);
    }
    if let Some(path) = &config.output {
        emit_csv(&report.records, path)?;
    }
    print!("{}", summary(&report));
    Ok(())
}

fn run_entropy_demo(cli: &Cli) -> Result<(), Error> {
    const STATES: usize = 100;
    println!(
        "{:>2} {:>2}  {:>14}  {:>14}  {:>12}",
        "d", "n", "max|dS/dt|*", "max|d(Σωu)/dt|", "naive>1e-6"
    );
    let mut ok = true;
    for d in 1..=3 {
        for n in 3..=6 {
            let s = entropy_survey(d, n, STATES, cli.seed ^ (d * 16 + n) as u64)?;
            let passed = s.max_entropy_rate <= 1e-12
                && s.max_conservation_rate <= 1e-12
                && s.naive_violation_fraction() >= 0.95;
            ok &= passed;
            println!(
                "{d:>2} {n:>2}  {:>14.3e}  {:>14.3e}  {:>9}/{STATES}{}",
                s.max_entropy_rate,
                s.max_conservation_rate,
                s.naive_violations,
                if passed { "" } else { "  FAIL" }
            );
        }
    }
    println!("* normalized by 1 + |S|");
    if ok {
        Ok(())
    } else {
        Err(Error::CorrectnessGate(
            "entropy conservation checks failed".into(),
        ))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = if cli.demo_entropy {
        run_entropy_demo(&cli)
    } else {
        run_benchmark_cli(&cli)
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
