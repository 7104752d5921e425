use std::path::PathBuf;
use std::process::ExitCode;

use burgers_core::harness::{parse_config, run_experiment, HarnessError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "burgers",
    version,
    about = "Exponential B-spline solver for the coupled Burgers system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `out` in the config.
        #[arg(long, env = "BURGERS_OUT_DIR")]
        out: Option<PathBuf>,
    },
}

fn solve(config: PathBuf, out: Option<PathBuf>) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&config).map_err(|e| {
        HarnessError::Config(burgers_core::harness::ConfigError {
            line: None,
            field: "config".into(),
            message: format!("cannot read {}: {e}", config.display()),
        })
    })?;
    let cfg = parse_config(&text)?;
    let dir = out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = run_experiment(&cfg, &dir)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for f in &outcome.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Command::Solve { config, out } = cli.command;
    match solve(config, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
