use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ncosc::{CliError, Format, RunConfig};

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

/// Noncommutative oscillator analyses driven by a JSON run configuration.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides `output.path`. Without either the report goes to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Suppress the summary line on stderr.
    #[arg(long)]
    quiet: bool,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::io(format!("cannot read {}", args.config.display()), e))?;
    let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(p) = &args.output {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = args.format {
        cfg.output.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match load(&args).and_then(|cfg| ncosc::run(&cfg)) {
        Ok(summary) => {
            if !args.quiet {
                eprintln!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
