//! Library side of the `umebh` binary: argument model, file format, reports
//! and the five commands.

pub mod commands;
pub mod format;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use format::{FileKind, MatrixFile};
pub use report::{Clause, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("malformed input at {location}: {message}")]
    Malformed { location: String, message: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] umebh_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) | CliError::Core(umebh_core::Error::Budget { .. }) => EXIT_BUDGET,
            CliError::Core(umebh_core::Error::Consistency(_)) => EXIT_FAIL,
            _ => EXIT_MALFORMED,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "umebh", version, about = "Partial Hadamard matrices and unextendible maximally entangled bases")]
pub struct Cli {
    /// Base seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Orthogonality tolerance (Gram checks).
    #[arg(long, global = true)]
    pub tol_orth: Option<f64>,
    #[arg(long, global = true)]
    pub tol_unitary: Option<f64>,
    #[arg(long, global = true)]
    pub tol_unimodular: Option<f64>,
    /// Residual below which a solver candidate counts as a witness.
    #[arg(long, global = true)]
    pub tol_success: Option<f64>,
    #[arg(long, global = true)]
    pub tol_evidence: Option<f64>,
    /// Solver restarts.
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Roots of unity per coordinate in the grid oracle.
    #[arg(long, global = true)]
    pub grid_order: Option<usize>,
    /// Output path (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Fourier,
    Prop2,
    Example5b,
    Example7a,
    S0,
    Umeb,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a matrix file from the built-in catalog.
    Generate {
        family: Family,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Check a file; exit 0 iff every clause passes.
    Verify {
        file: PathBuf,
        /// Also search for an extending member (partial Hadamard: greedy
        /// extension first, then the stalled matrix is checked).
        #[arg(long)]
        unextendible: bool,
        /// Exit 3 when the grid oracle is over budget.
        #[arg(long)]
        require_oracle: bool,
    },
    /// Append the missing row of a (d-1) x d partial Hadamard matrix.
    Complete {
        file: PathBuf,
        /// Where to write the JSON report (default stdout).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Extend a partial Hadamard matrix greedily and collect evidence.
    Search {
        file: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        require_oracle: bool,
    },
    /// Existence of a UMEB in dimension d.
    Classify { d: u64 },
}

pub use commands::run;
