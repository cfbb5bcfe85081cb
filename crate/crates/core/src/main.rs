use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use redflag::extract::BackendKind;
use redflag::pipeline::{self, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(name = "redflag", version, about = "Red-flag feature extraction and risk-model lift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override `backend.kind`.
    #[arg(long, global = true)]
    backend: Option<BackendKind>,
    /// Override `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate transactions.csv and windows.json.
    Gen,
    /// Extract features.json from the generated windows.
    Extract,
    /// Fit the quantizer and train baseline and enriched models.
    Train,
    /// Evaluate both models on the held-out rows.
    Eval,
    /// Run gen, extract, train and eval.
    Pipeline,
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    }
    .with_overrides(cli.backend, cli.out);
    cfg.validate()?;
    match cli.command {
        Command::Gen => {
            let s = pipeline::cmd_gen(&cfg)?;
            println!("{} transactions, {} windows ({} positive)", s.n_transactions, s.n_windows, s.n_positive);
        }
        Command::Extract => {
            let s = pipeline::cmd_extract(&cfg)?;
            println!("{} windows extracted via {}, {} failed", s.n_extracted, s.backend.as_str(), s.failures.len());
        }
        Command::Train => {
            let s = pipeline::cmd_train(&cfg)?;
            println!("trained on {} rows, {} held out", s.n_train, s.n_test);
        }
        Command::Eval => println!("{}", pipeline::cmd_eval(&cfg)?),
        Command::Pipeline => println!("{}", pipeline::cmd_pipeline(&cfg)?.eval),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
