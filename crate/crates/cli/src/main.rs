use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swseq_cli::commands::{self, sha256_hex, RunContext};
use swseq_cli::{CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "swseq", version, about = "Design and evaluate antenna switching sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for ambiguity evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory (overrides `output_dir` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Anneal a random or hybrid sequence.
    Optimize,
    /// Sweep the ambiguity function of one sequence.
    Ambiguity,
    /// Closed-form and numeric Cramér-Rao bounds for a ULA.
    Crlb,
    /// Compare sequential, random and hybrid switching.
    Compare,
    /// Fraction of elements with significant gain toward the reference direction.
    EffectiveFactor,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Optimize => "optimize",
            Command::Ambiguity => "ambiguity",
            Command::Crlb => "crlb",
            Command::Compare => "compare",
            Command::EffectiveFactor => "effective-factor",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let bytes = fs::read(&path).map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
    let mut config = ExperimentConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out = cli
        .out
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| CliError::Config("output directory missing: pass --out or set output_dir".into()))?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    fs::create_dir_all(&out)?;
    let ctx = RunContext {
        command: cli.command.name().to_string(),
        config,
        config_sha256: sha256_hex(&bytes),
        out,
        threads: cli.threads,
    };
    match cli.command {
        Command::Optimize => commands::optimize(&ctx),
        Command::Ambiguity => commands::ambiguity(&ctx),
        Command::Crlb => commands::crlb(&ctx),
        Command::Compare => commands::compare(&ctx),
        Command::EffectiveFactor => commands::effective_factor(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("swseq: {e}");
            e.exit_code()
        }
    }
}
