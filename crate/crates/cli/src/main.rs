//! `bendwave` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use bendwave::experiment::{self, ExperimentSpec, DEFAULT_ANALYZE_STATIONS};
use bendwave::mask::BaseHint;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bendwave", version, about = "Bend propagation along a tapered soft arm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and analyse the result.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract ordered midlines from a directory of mask frames.
    Extract {
        #[arg(long)]
        masks: PathBuf,
        #[arg(long)]
        fixture: PathBuf,
        /// Frame interval in seconds.
        #[arg(long)]
        dt: f64,
        /// Pixel pitch in metres per pixel.
        #[arg(long)]
        pitch: f64,
        /// Image side the arm base is attached to.
        #[arg(long, value_parser = parse_hint)]
        base_hint: BaseHint,
        #[arg(long)]
        out: PathBuf,
    },
    /// Curvature field and bend-velocity profile of a midline table.
    Analyze {
        #[arg(long)]
        midlines: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ANALYZE_STATIONS)]
        stations: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Overlay two bend tables on the normalized grid.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a material x rpm x medium grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

fn parse_hint(s: &str) -> Result<BaseHint, String> {
    s.parse().map_err(|e: bendwave::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let spec = match cli.command {
        Command::Simulate { config, out } => ExperimentSpec::Simulate { config, out },
        Command::Extract {
            masks,
            fixture,
            dt,
            pitch,
            base_hint,
            out,
        } => ExperimentSpec::Extract {
            masks,
            fixture,
            dt,
            pitch,
            base_hint,
            out,
        },
        Command::Analyze {
            midlines,
            stations,
            out,
        } => ExperimentSpec::Analyze {
            midlines,
            stations,
            out,
        },
        Command::Compare { a, b, out } => ExperimentSpec::Compare { a, b, out },
        Command::Sweep { config, out, jobs } => ExperimentSpec::Sweep { config, out, jobs },
    };
    match experiment::run(&spec) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(experiment::exit_code(&e) as u8)
        }
    }
}
