//! Experiment driver: benchmark selection, parameter sweeps, CSV output and
//! the `K_2(A)^{-1}` tolerance helper.

mod output;
mod presets;
mod run;
mod spec;

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrators::IntegratorError;
use crate::linalg::{singular_value_bounds_seeded, LinalgError};
use crate::metrics::MetricsError;
use crate::problem::{build_advdiff, build_burgers, AdvDiffParams, Benchmark, Grid, ProblemError};

pub use output::{write_results, write_step_log, RESULT_COLUMNS, STEP_LOG_COLUMNS};
pub use presets::{preset, PRESET_NAMES};
pub use run::{evaluate, run_experiment, Evaluation, ExperimentOutcome, ResultRow, StepLogRow, SweepPoint};
pub use spec::{EpsilonSpec, ExperimentSpec, SolverOptions};

/// Viscosity of the Burgers benchmark.
pub const BURGERS_NU: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}:{line}:{column}: {message}")]
    Config {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("unknown problem '{0}' (expected advdiff2d, advdiff3d or burgers2d)")]
    UnknownProblem(String),
    #[error("unknown preset '{name}' (available: {available})")]
    UnknownPreset { name: String, available: String },
    #[error("{0} is nonlinear: K_2(A)^-1 is undefined, give epsilon as an absolute value")]
    NonlinearProblem(ProblemId),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemId {
    #[serde(rename = "advdiff2d")]
    AdvDiff2d,
    #[serde(rename = "advdiff3d")]
    AdvDiff3d,
    #[serde(rename = "burgers2d")]
    Burgers2d,
}

impl ProblemId {
    pub fn label(self) -> &'static str {
        match self {
            ProblemId::AdvDiff2d => "advdiff2d",
            ProblemId::AdvDiff3d => "advdiff3d",
            ProblemId::Burgers2d => "burgers2d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ProblemId::AdvDiff3d => 3,
            _ => 2,
        }
    }

    pub fn is_linear(self) -> bool {
        self != ProblemId::Burgers2d
    }
}

impl std::fmt::Display for ProblemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProblemId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "advdiff2d" => Ok(ProblemId::AdvDiff2d),
            "advdiff3d" => Ok(ProblemId::AdvDiff3d),
            "burgers2d" => Ok(ProblemId::Burgers2d),
            _ => Err(HarnessError::UnknownProblem(s.to_string())),
        }
    }
}

/// Builds a benchmark on the unit cube with `n_per_dim` nodes per direction
/// and the default physical parameters.
pub fn build_problem(problem: ProblemId, n_per_dim: usize) -> Result<Benchmark> {
    build_problem_with_nu(problem, n_per_dim, BURGERS_NU)
}

pub(crate) fn build_problem_with_nu(problem: ProblemId, n_per_dim: usize, nu: f64) -> Result<Benchmark> {
    let grid = Grid::unit(problem.dim(), n_per_dim)?;
    let bench = match problem {
        ProblemId::AdvDiff2d | ProblemId::AdvDiff3d => build_advdiff(&grid, AdvDiffParams::benchmark(problem.dim()))?,
        ProblemId::Burgers2d => build_burgers(&grid, nu)?,
    };
    Ok(bench)
}

/// `K_2(A)^{-1}` of a benchmark's system matrix, with singular values
/// estimated to 1% relative accuracy.
pub fn epsilon_bar(problem: ProblemId, n_per_dim: usize) -> Result<f64> {
    if !problem.is_linear() {
        return Err(HarnessError::NonlinearProblem(problem));
    }
    epsilon_bar_of(&build_problem(problem, n_per_dim)?, problem, 0)
}

pub(crate) fn epsilon_bar_of(bench: &Benchmark, problem: ProblemId, seed: u64) -> Result<f64> {
    let a = bench
        .system
        .linear_operator()
        .ok_or(HarnessError::NonlinearProblem(problem))?;
    let est = singular_value_bounds_seeded(a, 1e-2, seed)?;
    Ok(1.0 / est.cond())
}
