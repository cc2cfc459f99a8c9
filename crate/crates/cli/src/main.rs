use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use ekcmap_core::config::RunConfig;
use ekcmap_core::pipeline::{self, parse_check, Pipeline, PipelineError, Stage};

#[derive(Parser)]
#[command(name = "ekcmap", version, about = "Map EKC claims, citation networks and author blocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage, or a single one with --stage.
    Run(RunArgs),
    /// Check a hyperedge file and print one line per error.
    ParseCheck {
        file: PathBuf,
    },
    /// Label claims in every abstract.
    Classify(RunArgs),
    /// Extract environmental topics.
    Topics(RunArgs),
    /// Build and prune the author citation networks.
    Network(RunArgs),
    /// Infer author blocks.
    Blocks(RunArgs),
    /// Write the report tables and charts.
    Report(RunArgs),
    /// Print the default configuration.
    DefaultConfig,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long, default_value = "ekcmap.toml")]
    config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stage to run (ingest, classify, topics, network, blocks, report).
    #[arg(long)]
    stage: Option<Stage>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Report uncorrected shares in the yearly series.
    #[arg(long)]
    raw: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Ignore and do not write the stage cache.
    #[arg(long)]
    no_cache: bool,
}

fn run(args: RunArgs, stage: Option<Stage>) -> Result<(), PipelineError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.sbm.seed = seed;
    }
    if let Some(r) = args.restarts {
        cfg.sbm.restarts = r;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.report.raw |= args.raw;
    pipeline::init_workers(cfg.workers);
    let mut p = Pipeline::new(cfg)?;
    if args.no_cache {
        p = p.without_cache();
    }
    let out = p.run(args.stage.or(stage))?;
    for name in out.names() {
        println!("{}", p.config().out_dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a, None),
        Command::Classify(a) => run(a, Some(Stage::Classify)),
        Command::Topics(a) => run(a, Some(Stage::Topics)),
        Command::Network(a) => run(a, Some(Stage::Network)),
        Command::Blocks(a) => run(a, Some(Stage::Blocks)),
        Command::Report(a) => run(a, Some(Stage::Report)),
        Command::DefaultConfig => {
            print!("{}", RunConfig::default().to_toml());
            Ok(())
        }
        Command::ParseCheck { file } => {
            let text = match fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    error!("cannot read {}: {e}", file.display());
                    return ExitCode::from(1);
                }
            };
            let (ok, errors) = parse_check(&text);
            for e in &errors {
                println!("{}:{}", file.display(), e);
            }
            println!("{ok} records parsed, {} errors", errors.len());
            return if errors.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
