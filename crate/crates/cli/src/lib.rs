//! Command line driver: one config file, many subcommands, outputs under
//! `<output_dir>/<config hash>/`.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{RunConfig, Strategy};

#[derive(Debug, Parser)]
#[command(name = "pisot-ifs", version, about = "Self-similar measures with complex Pisot contraction")]
pub struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Caps the worker thread count.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify roots, the complex Pisot property, dense rotations and the decay of 2 Re θ^n.
    Verify,
    /// Build the four-map system, certify separation and write ifs.json.
    Build,
    /// Certify the lower bound c on |ℱμ(4π θ̄^N)| and write bound.csv.
    CertifyBound,
    /// Evaluate ℱμ at one frequency.
    Fourier {
        #[arg(long, allow_hyphen_values = true)]
        xi_re: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi_im: f64,
    },
    /// Sup of |ℱμ| along a grid of directions.
    Scan {
        #[arg(long, default_value_t = 360)]
        dirs: usize,
        #[arg(long, default_value_t = 1e3)]
        rmin: f64,
        #[arg(long, default_value_t = 1e9)]
        rmax: f64,
        #[arg(long, default_value_t = 64)]
        radii: usize,
        /// Defaults to scan.csv in the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw Monte Carlo samples of μ into a PSLM file.
    Sample,
    /// Wiener statistic of the projection of μ onto a direction.
    Wiener {
        /// Angle in radians, or `eta^K` for the direction of θ̄^K.
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        #[arg(long = "M")]
        m: f64,
    },
    /// Band estimates of |ℱ|² of slices at the frequencies t_0..t_nmax.
    Slice {
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        #[arg(long, default_value_t = 9)]
        nmax: u64,
        /// Comma-separated half-widths; `lambda^m` means |λ|^m.
        #[arg(long, default_value = "lambda^4,lambda^6,lambda^8")]
        delta: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 200)]
        kcap: u32,
    },
    /// Summarize the run directory into report.txt.
    Report,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Certification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 success, 1 certification failure, 2 usage or configuration error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Certification(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

/// Resolves the effective config from the file and the global flags.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = effective_config(&cli)?;
    commands::dispatch(&cfg, &cli.command, stdout)
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
