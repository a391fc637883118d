mod commands;
mod input;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polylink::flow::FlowParams;

use commands::{AtlasArgs, AtlasFormat, ConvexifyArgs, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "polylink", version, about = "Planar polygon linkages: analysis, convex atlas and convexification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension, feasibility and straight-line configurations of side lengths.
    Analyze { file: PathBuf },
    /// Turn angles, winding, embeddedness and convexity of a polygon.
    Check { file: PathBuf },
    /// Descend the reflex-weighted energy until the polygon is convex.
    Convexify {
        file: PathBuf,
        /// Largest step in radians.
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        /// Convexity tolerance on the smallest turn angle.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Write the full trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write SVG frames, summary.svg and energy.csv into this directory.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Keep a frame every this many accepted steps.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Sample the convex atlas at level k.
    Atlas {
        #[arg(value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Samples per earlier interval.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, value_enum, default_value = "csv")]
        out: OutFormat,
        /// Write to this file instead of stdout.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Sweep the (6, 4, 2, 4) linkage and report its embedded arc.
    DemoFigureEight {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> commands::CmdResult {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Analyze { file } => commands::analyze(&file, &mut out),
        Command::Check { file } => commands::check(&file, &mut out),
        Command::Convexify { file, step, tol, max_iter, trace, svg, stride } => {
            let params = FlowParams {
                step,
                convexity_tol: tol,
                max_iterations: max_iter,
                snapshot_stride: stride,
                ..FlowParams::default()
            };
            commands::convexify_cmd(&file, &ConvexifyArgs { params, trace, svg }, &mut out)
        }
        Command::Atlas { input, k, grid, out: format, file } => {
            let format = match format {
                OutFormat::Csv => AtlasFormat::Csv,
                OutFormat::Json => AtlasFormat::Json,
            };
            commands::atlas(&input, &AtlasArgs { k, grid, format, file }, &mut out)
        }
        Command::DemoFigureEight { samples, svg } => commands::demo_figure_eight(samples, svg.as_deref(), &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
