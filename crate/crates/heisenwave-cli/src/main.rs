use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

/// All checks passed.
pub const EXIT_OK: u8 = 0;
/// At least one check failed.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Bad flags, invalid parameters or unusable files.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "heisenwave", version, about = "Wavelets, heat kernels and reproducing kernels on the Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Samples along p and q.
    #[arg(long = "grid", default_value_t = 33)]
    pub samples: usize,
    /// Samples along t; defaults to 2·grid − 1.
    #[arg(long)]
    pub t_samples: Option<usize>,
    /// Half extent of every axis.
    #[arg(long, default_value_t = 6.0)]
    pub extent: f64,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long = "A", default_value_t = 4.0)]
    pub a_max: f64,
    /// Number of geometric scales.
    #[arg(long, default_value_t = 32)]
    pub scales: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Group,
    Heat,
    Wavelet,
    Calderon,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Hwf1,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Heat,
    Phi,
    Psi,
    Kernel,
    /// Moments of the wavelet up to homogeneous degree 2, as CSV.
    Moments,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a property suite and report residuals.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Emit the JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wavelet transform of an HWF1 field: one slab per scale plus a JSON manifest.
    Cwt {
        /// Input field (HWF1).
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long = "A", default_value_t = 8.0)]
        a_max: f64,
        #[arg(long, default_value_t = 32)]
        scales: usize,
        /// Manifest path; slabs are written beside it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Sample a function on a grid.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[command(flatten)]
        grid: GridArgs,
        /// Heat time.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[command(flatten)]
        window: WindowArgs,
        /// Kernel from the closed form instead of the scale sum.
        #[arg(long)]
        closed_form: bool,
        #[arg(long, value_enum, default_value_t = Format::Hwf1)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
}

fn init_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("HEISENWAVE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| format!("HEISENWAVE_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err("HEISENWAVE_THREADS must be positive".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let res = match cli.command {
        Command::Verify { suite, grid, window, json, out } => commands::verify(suite, &grid, &window, json, out.as_deref()),
        Command::Cwt { input, eps, a_max, scales, out, json } => commands::cwt(&input, eps, a_max, scales, &out, json),
        Command::Gen { kind, grid, s, window, closed_form, format, out } => {
            commands::gen(kind, &grid, s, &window, closed_form, format, &out)
        }
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
