use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kg_core::arith::Rational;
use kg_core::dirichlet::TargetScheme;
use kg_core::pins::Pins;

mod commands;
mod config;
mod error;
mod output;

use config::{ExperimentConfig, Format, PsiConfig};
use error::CliError;
use output::Summary;

const DEFAULT_PINS_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/pins.toml");

#[derive(Parser)]
#[command(name = "kglab", version, about = "Exact and Monte Carlo experiments on inhomogeneous approximation sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON); the shipped default when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format: csv or json.
    #[arg(long, global = true, value_parser = enum_arg::<Format>)]
    format: Option<Format>,
    /// Also write the JSON summary here.
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Preset name for psi.
    #[arg(long, global = true)]
    psi: Option<String>,
    /// Scalar target `y` as "num/den", or a fixed pair as "pair:a/b".
    #[arg(long, global = true, value_parser = target_arg)]
    target: Option<TargetScheme>,
    /// plain, coprime, tilde or fixed_pair.
    #[arg(long, global = true, value_parser = enum_arg::<kg_core::sets::Variant>)]
    variant: Option<kg_core::sets::Variant>,
    /// Dichotomy windows as "Q0:Q1,Q0:Q1,...".
    #[arg(long, global = true, value_parser = schedule_arg)]
    schedule: Option<Schedule>,
    /// QIA cutoffs as "Q,Q,...".
    #[arg(long, global = true, value_parser = cutoffs_arg)]
    cutoffs: Option<Cutoffs>,
    /// quick or full.
    #[arg(long, global = true, value_parser = enum_arg::<kg_core::verify::Profile>)]
    profile: Option<kg_core::verify::Profile>,
    /// Pins file; the shipped pins when absent.
    #[arg(long, global = true)]
    pins: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Dirichlet pairs (d, a, b, |b y - a|) over the moduli.
    DirichletPairs,
    /// Closed-form measure against the interval-union oracle.
    Measure,
    /// Exact quasi-independence sums and ratios at each cutoff.
    Qia,
    /// Vanishing intersections on the configured tuples.
    Disjointness,
    /// Overlap sums against the pinned constant.
    Gallagher,
    /// Tail-union estimates over the schedule.
    Dichotomy,
    /// Every acceptance criterion.
    VerifySuite {
        /// Regenerate the pins file before running.
        #[arg(long)]
        recalibrate: bool,
    },
}

/// Parses a snake_case serde enum from its name.
fn enum_arg<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn target_arg(s: &str) -> Result<TargetScheme, String> {
    match s.strip_prefix("pair:") {
        Some(pair) => {
            let (a, b) = pair.split_once('/').ok_or("expected pair:a/b")?;
            let a = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
            let b = b.trim().parse::<u64>().map_err(|e| e.to_string())?;
            TargetScheme::fixed_pair(vec![a], b).map_err(|e| e.to_string())
        }
        None => {
            let y: Rational = s.parse().map_err(|e: kg_core::Error| e.to_string())?;
            Ok(TargetScheme::Rational { y: vec![y] })
        }
    }
}

#[derive(Clone)]
struct Schedule(Vec<(u64, u64)>);

#[derive(Clone)]
struct Cutoffs(Vec<u64>);

fn schedule_arg(s: &str) -> Result<Schedule, String> {
    s.split(',')
        .map(|w| {
            let (a, b) = w.split_once(':').ok_or_else(|| format!("expected Q0:Q1, got {w:?}"))?;
            Ok((
                a.trim().parse().map_err(|e| format!("{w:?}: {e}"))?,
                b.trim().parse().map_err(|e| format!("{w:?}: {e}"))?,
            ))
        })
        .collect::<Result<_, String>>()
        .map(Schedule)
}

fn cutoffs_arg(s: &str) -> Result<Cutoffs, String> {
    s.split(',')
        .map(|q| q.trim().parse().map_err(|e| format!("{q:?}: {e}")))
        .collect::<Result<_, String>>()
        .map(Cutoffs)
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::shipped(),
    };
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.samples {
        cfg.samples = v;
    }
    if let Some(v) = &cli.psi {
        cfg.psi = PsiConfig::Preset { preset: v.clone() };
    }
    if let Some(v) = &cli.target {
        cfg.target = v.clone();
    }
    if let Some(v) = cli.variant {
        cfg.variant = v;
    }
    if let Some(v) = &cli.schedule {
        cfg.schedule = v.0.clone();
    }
    if let Some(v) = &cli.cutoffs {
        cfg.cutoffs = v.0.clone();
    }
    if let Some(v) = cli.profile {
        cfg.profile = v;
    }
    if let Some(v) = cli.format {
        cfg.format = v;
    }
    if let Some(v) = &cli.out {
        cfg.output = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    let cfg = effective_config(cli)?;
    let pins = match &cli.pins {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            Pins::parse(&text)?
        }
        None => Pins::shipped()?,
    };
    let outcome = match cli.command {
        Command::DirichletPairs => commands::dirichlet_pairs(&cfg)?,
        Command::Measure => commands::measure(&cfg)?,
        Command::Qia => commands::qia(&cfg)?,
        Command::Disjointness => commands::disjointness(&cfg)?,
        Command::Gallagher => commands::gallagher(&cfg, &pins)?,
        Command::Dichotomy => commands::dichotomy(&cfg)?,
        Command::VerifySuite { recalibrate } => {
            let path = cli.pins.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_PINS_PATH));
            commands::verify_suite(&cfg, pins, recalibrate, &path)?
        }
    };
    for line in &outcome.lines {
        eprintln!("{line}");
    }
    let summary = Summary { config: cfg, results: outcome.results };
    output::emit(&output::render(&summary)?, summary.config.output.as_deref())?;
    if let Some(path) = &cli.summary {
        output::emit(&summary.to_json()?, Some(path))?;
    }
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError::check("one or more checks failed"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", CliError::config(e.to_string().trim()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
