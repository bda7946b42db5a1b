//! Command-line experiment runner for the multimode-fiber security simulator.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_mdm, cmd_modes, cmd_secure, cmd_sweep, cmd_tm_gen, Outcome};
pub use config::{Experiment, ExperimentConfig, Overrides};

#[derive(Debug, Parser)]
#[command(name = "mmfpls", version, about = "Simulate physical-layer security over a multimode fiber link")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML experiment config; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Base seed, overriding `seed`.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Trials per grid cell, overriding `trials`.
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the fiber's LP modes and write the mode table.
    Modes,
    /// Generate the configured transmission matrices.
    TmGen,
    /// Run the channel x noise-level sweep and write CSV plus heatmaps.
    Sweep {
        /// Skip the SVG heatmaps.
        #[arg(long)]
        no_heatmaps: bool,
    },
    /// Report channels that stay secure at a given noise level.
    Secure {
        /// Classify an existing sweep CSV instead of running a sweep.
        #[arg(long, value_name = "CSV")]
        report: Option<PathBuf>,
        /// Noise level to classify at, overriding `secure.noise_level`.
        #[arg(long)]
        level: Option<f64>,
    },
    /// Run a multi-channel message over the noise grid.
    Mdm {
        /// One-based channel labels, comma separated.
        #[arg(long, value_delimiter = ',', value_name = "LIST")]
        channels: Option<Vec<usize>>,
        /// Bit per listed channel, e.g. 101; a channel is active where its bit is 1.
        #[arg(long)]
        bits: Option<String>,
    },
}

impl Cli {
    pub fn experiment(&self) -> Result<Experiment> {
        let overrides = Overrides {
            seed: self.common.seed,
            trials: self.common.trials,
            out: self.common.out.clone(),
        };
        let mut exp = Experiment::load(self.common.config.as_deref(), &overrides)?;
        match &self.command {
            Command::Sweep { no_heatmaps: true } => exp.config.output.heatmaps = false,
            Command::Secure { report, level } => {
                if let Some(r) = report {
                    // Command-line paths are relative to the working directory.
                    exp.config.secure.report = Some(std::path::absolute(r)?);
                }
                if let Some(l) = level {
                    exp.config.secure.noise_level = *l;
                }
            }
            Command::Mdm { channels, bits } => {
                if let Some(c) = channels {
                    exp.config.mdm.channels = c.clone();
                    if bits.is_none() {
                        exp.config.mdm.bits = None;
                    }
                }
                if let Some(b) = bits {
                    exp.config.mdm.bits = Some(b.clone());
                }
            }
            _ => {}
        }
        exp.validate()?;
        Ok(exp)
    }

    pub fn run(&self) -> Result<Outcome> {
        let exp = self.experiment()?;
        match self.command {
            Command::Modes => cmd_modes(&exp),
            Command::TmGen => cmd_tm_gen(&exp),
            Command::Sweep { .. } => cmd_sweep(&exp),
            Command::Secure { .. } => cmd_secure(&exp).map(|(o, _)| o),
            Command::Mdm { .. } => cmd_mdm(&exp).map(|(o, _)| o),
        }
    }
}
