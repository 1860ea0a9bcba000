mod commands;
mod render;

use clap::{Args, Parser, Subcommand};

/// Exact toolkit for nodal integral affine base spaces: inspect canonical
/// types, verify the level-translation isomorphism and the length oracle,
/// scan heights for recurrence, and render charts.
#[derive(Parser)]
#[command(name = "ridgeline", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file (canonical type, chart, polygon or orbit, depending on
    /// the command)
    #[arg(long)]
    input: std::path::PathBuf,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the classifying data, length function samples, ridge data and
    /// node inventory of a canonical type
    Describe {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every certified identity end to end: length oracle, piece
    /// checks of the level-translation map, and per-height verdicts
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of sampled heights for the verdict section
        #[arg(long, default_value_t = 12)]
        resolution: u64,
        /// Witness horizon for non-recurrence
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        /// Sample count for the isomorphism verification
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Scan evenly spaced heights and report every verdict as JSON
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 50)]
        resolution: u64,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        /// Denominator bound for the exact recurrent-height inventory
        #[arg(long, default_value_t = 12)]
        qmax: u64,
    },
    /// Circular gap statistics of an orbit {i*rho mod 1}
    Orbit {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Render a chart (or the natural chart of a type) as deterministic SVG
    Render {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of grey level sets to draw
        #[arg(long, default_value_t = 8)]
        levels: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Describe { common } => commands::describe(&common.input, common.out.as_deref()),
        Command::Verify {
            common,
            resolution,
            horizon,
            samples,
        } => commands::verify(&common.input, resolution, horizon, samples),
        Command::Scan {
            common,
            resolution,
            horizon,
            qmax,
        } => commands::scan(&common.input, common.out.as_deref(), resolution, horizon, qmax),
        Command::Orbit { common } => commands::orbit(&common.input, common.out.as_deref()),
        Command::Render { common, levels } => {
            commands::render(&common.input, common.out.as_deref(), levels)
        }
    };
    std::process::exit(code);
}
