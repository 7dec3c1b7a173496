use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use helixforms_cli::commands::{
    cmd_derivative, cmd_invariants, cmd_path_check, cmd_verify, FunctionalArg, InvariantsOptions, Lemma, Suite,
};
use helixforms_cli::{load_scenario, CliError, Report, Scenario};

/// Flux, helicity and Calabi invariants of exact fields on M x S^1.
#[derive(Parser)]
#[command(name = "helixforms", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Override the quadrature refinement level.
    #[arg(long)]
    level: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Flux vector, helicity and Calabi value with error estimates.
    Invariants {
        #[command(flatten)]
        common: Common,
        /// Gauge choice `L,K` (overrides the scenario).
        #[arg(long, value_parser = parse_gauge)]
        gauge: Option<(usize, usize)>,
        /// Also report the helicity for every gauge choice.
        #[arg(long)]
        matrix: bool,
    },
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Samples per path in the `paths` suite.
        #[arg(long, default_value_t = 17)]
        samples: usize,
    },
    /// Helicity along a constant-helicity path.
    PathCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long, default_value_t = 17)]
        samples: usize,
        /// Also write the samples as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Directional derivatives along bump probes and the fitted density ratio.
    Derivative {
        #[command(flatten)]
        common: Common,
        /// `helicity`, `sq-helicity` or `flux:IDX`.
        #[arg(long)]
        functional: FunctionalArg,
        #[arg(long, default_value_t = 6)]
        probes: usize,
        /// Largest finite-difference step; `h/2` and `h/4` are also used.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
}

fn parse_gauge(s: &str) -> Result<(usize, usize), String> {
    let (l, k) = s.split_once(',').ok_or_else(|| format!("expected L,K, got {s:?}"))?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((n(l)?, n(k)?))
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HELIXFORMS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Usage(format!("HELIXFORMS_THREADS must be a positive integer, got {v:?}"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))
}

fn emit(report: &Report, s: &Scenario, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&report.to_json(s)).expect("report is plain JSON");
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })?;
            print!("{}", report.summary());
        }
        None => {
            print!("{text}");
            eprint!("{}", report.summary());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    let (common, report) = match cli.command {
        Command::Invariants { common, gauge, matrix } => {
            let s = load_scenario(&common.scenario)?;
            let r = cmd_invariants(&s, InvariantsOptions { gauge, level: common.level, matrix })?;
            (common, (s, r))
        }
        Command::Verify { common, suite, samples } => {
            let s = load_scenario(&common.scenario)?;
            let r = cmd_verify(&s, suite, common.level, samples)?;
            (common, (s, r))
        }
        Command::PathCheck { common, lemma, samples, csv } => {
            let s = load_scenario(&common.scenario)?;
            let r = cmd_path_check(&s, lemma, samples, common.level, csv.as_deref())?;
            (common, (s, r))
        }
        Command::Derivative { common, functional, probes, step } => {
            let s = load_scenario(&common.scenario)?;
            let r = cmd_derivative(&s, functional, probes, step, common.level)?;
            (common, (s, r))
        }
    };
    let (s, r) = report;
    emit(&r, &s, common.report.as_deref())?;
    Ok(r.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
