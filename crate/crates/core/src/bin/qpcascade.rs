use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qpcascade::cli::{cmd_cascade, cmd_delta1, cmd_diagram, cmd_selfsim, cmd_slopes, RunConfig};
use qpcascade::numerics::Precision;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Cascade,
    Slopes,
    Delta1,
    Diagram,
    Selfsim,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Standard,
    Extended,
}

/// Period-doubling cascades of quasi-periodically forced logistic maps.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qpcascade: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    if let Some(p) = args.precision {
        cfg.precision = match p {
            PrecisionArg::Standard => Precision::Standard,
            PrecisionArg::Extended => Precision::Extended,
        };
    }
    let result = cfg.validate().and_then(|_| match args.command {
        Command::Cascade => cmd_cascade(&cfg),
        Command::Slopes => cmd_slopes(&cfg),
        Command::Delta1 => cmd_delta1(&cfg),
        Command::Diagram => cmd_diagram(&cfg),
        Command::Selfsim => cmd_selfsim(&cfg),
    });
    match result {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            println!("{}", report.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qpcascade: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
