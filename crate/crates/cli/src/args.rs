use crate::config::{MethodName, Settings, SnapshotPolicy};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "undither",
    version,
    about = "Dither 8-bit PGM images and reconstruct gray levels from dithered ones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert an 8-bit PGM to a bilevel {0, 255} PGM.
    Dither {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(MethodName))]
        method: Option<MethodName>,
        /// Bayer matrix order for --method ordered (2, 4 or 8).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Box-filter and diffuse a dithered PGM, recording metrics per step.
    Undither {
        input: PathBuf,
        #[command(flatten)]
        flags: UnditherFlags,
    },
    /// Print one metrics row for an image, with MSE/PSNR against a second.
    Metrics {
        image: PathBuf,
        other: Option<PathBuf>,
        #[arg(long)]
        theta: Option<u32>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Print "level,count" for all 256 gray levels.
    Histogram { input: PathBuf },
    /// Print "col,value" along one image row.
    Profile { input: PathBuf, row: usize },
}

#[derive(Debug, Args)]
pub struct UnditherFlags {
    /// Original image to compare every iterate against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub passes: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub theta: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    /// best | step:K | final | all | all:K
    #[arg(long, value_parser = clap::value_parser!(SnapshotPolicy))]
    pub snapshot: Option<SnapshotPolicy>,
    /// Accept input that is not strictly bilevel.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Measure every N-th step (the last step is always measured).
    #[arg(long)]
    pub stride: Option<usize>,
}

impl UnditherFlags {
    pub fn settings(&self) -> Settings {
        Settings {
            window: self.window,
            passes: self.passes,
            p: self.p,
            epsilon: self.epsilon,
            dt: self.dt,
            iterations: self.iterations,
            theta: self.theta,
            d: self.d,
            snapshot: self.snapshot,
            reference: self.reference.clone(),
            out: self.out.clone(),
            stride: self.stride,
            force: self.force.then_some(true),
            ..Default::default()
        }
    }
}
