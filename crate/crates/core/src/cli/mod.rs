//! Command-line front end: config parsing, subcommands, SVG plots.

pub mod commands;
pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_eval, cmd_interpolate, cmd_plot, cmd_pretrain, cmd_train, evaluate, interpolate_latents, load_encoder,
    load_model, worker_threads, EvalReport,
};
pub use config::{ExperimentConfig, Precision};
pub use svg::{emit_scatter_svg, scatter_svg};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "rfgan", version, about = "Train and evaluate GANs with autoencoder features in the discriminator")]
pub struct Cli {
    /// experiment config (JSON)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// output directory, overrides `output_dir`
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// overrides `seed`
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pretrain the denoising autoencoder
    PretrainAe,
    /// Train the GAN
    Train {
        /// autoencoder checkpoint (default: <out>/autoencoder.rfgn)
        #[arg(long)]
        encoder: Option<PathBuf>,
    },
    /// Score a trained generator, writing eval.json
    Eval {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Generate along a line in latent space
    Interpolate {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// comma-separated latent vector
        #[arg(long, value_parser = parse_vector)]
        z0: Option<Latent>,
        #[arg(long, value_parser = parse_vector)]
        z1: Option<Latent>,
        #[arg(long, default_value_t = 9)]
        steps: usize,
    },
    /// Scatter plots of generated and real ring samples
    Plot {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

/// Latent vector given on the command line as `a,b,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Latent(pub Vec<f64>);

fn parse_vector(s: &str) -> std::result::Result<Latent, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Latent)
}

fn dispatch<T: crate::Scalar>(cli: &Cli, cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    match &cli.command {
        Command::PretrainAe => cmd_pretrain::<T>(cfg, out),
        Command::Train { encoder } => cmd_train::<T>(cfg, out, encoder.as_deref()),
        Command::Eval { checkpoint } => cmd_eval::<T>(cfg, out, checkpoint.as_deref()),
        Command::Interpolate { checkpoint, z0, z1, steps } => {
            let (z0, z1) = (z0.as_ref().map(|z| z.0.as_slice()), z1.as_ref().map(|z| z.0.as_slice()));
            cmd_interpolate::<T>(cfg, out, checkpoint.as_deref(), z0, z1, *steps)
        }
        Command::Plot { checkpoint } => cmd_plot::<T>(cfg, out, checkpoint.as_deref()),
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(&cfg.name));
    worker_threads()?;
    match cfg.precision {
        Precision::F32 => dispatch::<f32>(cli, &cfg, &out),
        Precision::F64 => dispatch::<f64>(cli, &cfg, &out),
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
