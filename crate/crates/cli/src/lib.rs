//! Command-line front end for the `uncrossing` library.
//!
//! [`run`] executes a parsed command and returns the exit code with the text
//! to print, so tests can drive commands without spawning processes.

pub mod commands;
pub mod format;
pub mod generate;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{run, Outcome};

#[derive(Debug, Parser)]
#[command(name = "uncross", version, about = "Uncrossing game, uncrossing procedures and LP experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RedKind {
    Paper,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UncrossMode {
    Naive,
    Strategic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded instance file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        family_size: usize,
        #[arg(long, value_enum, default_value = "requirement")]
        kind: generate::Kind,
        #[arg(long, env = "UNCROSS_SEED", default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check skew-supermodularity of the instance's function exhaustively.
    VerifyFn { instance: PathBuf },
    /// Play the uncrossing game on the instance's family.
    Play {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "paper")]
        red: RedKind,
        /// random, random:SEED, maxpot, alwaysx or exhaustive.
        #[arg(long, default_value = "maxpot")]
        blue: String,
        /// Seed for `--blue random` without an explicit seed.
        #[arg(long, env = "UNCROSS_SEED", default_value_t = 0)]
        seed: u64,
        /// Iteration cap; defaults to 8·n³·|F0|.
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        allow_none: bool,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Include Red's state in each trace record.
        #[arg(long)]
        verbose: bool,
    },
    /// Uncross the instance's dual solution.
    Uncross {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "strategic")]
        mode: UncrossMode,
        /// Multiply every weight by this rational first.
        #[arg(long)]
        scale: Option<String>,
    },
    /// Perturb laminar starts toward an optimum and uncross, per trial.
    LpExperiment {
        instance: PathBuf,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, env = "UNCROSS_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Re-apply a trace to the instance's family.
    Replay {
        instance: PathBuf,
        trace: PathBuf,
        #[arg(long)]
        allow_none: bool,
    },
}
