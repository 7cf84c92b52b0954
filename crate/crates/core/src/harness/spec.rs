use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use super::{HarnessError, ProblemId, Result, BURGERS_NU};
use crate::integrators::{IntegratorConfig, Method};

/// A stability tolerance: either absolute, or a multiple `gamma` of
/// `K_2(A)^{-1}` (linear problems only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Absolute(f64),
    Relative { gamma: f64 },
}

impl EpsilonSpec {
    pub fn resolve(self, epsilon_bar: Option<f64>) -> Option<f64> {
        match self {
            EpsilonSpec::Absolute(e) => Some(e),
            EpsilonSpec::Relative { gamma } => epsilon_bar.map(|e| gamma * e),
        }
    }

    pub fn needs_epsilon_bar(self) -> bool {
        matches!(self, EpsilonSpec::Relative { .. })
    }
}

/// Solver tolerances shared by every sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub delta_rcond: f64,
    pub newton_tol_factor: f64,
    pub newton_maxit: usize,
    pub gmres_rtol: f64,
    pub gmres_maxit: usize,
    pub ilu_droptol: f64,
    pub divergence_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            delta_rcond: d.delta_rcond,
            newton_tol_factor: d.newton_tol_factor,
            newton_maxit: d.newton_maxit,
            gmres_rtol: d.gmres_rtol,
            gmres_maxit: d.gmres_maxit,
            ilu_droptol: d.ilu_droptol,
            divergence_factor: d.divergence_factor,
        }
    }
}

/// A sweep over grids, methods, step sizes, tolerances and window sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub problem: ProblemId,
    #[serde(deserialize_with = "one_or_many")]
    pub n_per_dim: Vec<usize>,
    pub methods: Vec<Method>,
    pub dts: Vec<f64>,
    #[serde(default = "default_final_time")]
    pub final_time: f64,
    /// Needed when the method list contains IMEX-RB.
    #[serde(default)]
    pub epsilons: Vec<EpsilonSpec>,
    #[serde(default = "default_n_basis", deserialize_with = "one_or_many")]
    pub n_basis: Vec<usize>,
    #[serde(default = "default_max_inner")]
    pub max_inner: usize,
    /// Viscosity for Burgers.
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Seeds the Lanczos start vectors of the condition estimate.
    #[serde(default)]
    pub seed: u64,
    /// Timed repetitions per point; reported wall time is their mean.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Result CSV path.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Optional per-step CSV (error and inner iterations over time).
    #[serde(default)]
    pub step_log: Option<PathBuf>,
}

fn default_final_time() -> f64 {
    1.0
}

fn default_n_basis() -> Vec<usize> {
    vec![10]
}

fn default_max_inner() -> usize {
    100
}

fn default_nu() -> f64 {
    BURGERS_NU
}

fn default_repeats() -> usize {
    1
}

fn one_or_many<'de, D>(de: D) -> std::result::Result<Vec<usize>, D::Error>
where
    D: Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

impl ExperimentSpec {
    /// Parses a JSON spec; errors carry the line and column.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Number of steps for `dt`, which must divide the final time.
    pub fn n_steps(&self, dt: f64) -> Result<usize> {
        let exact = self.final_time / dt;
        let n = exact.round();
        if (exact - n).abs() > 1e-9 * exact.max(1.0) {
            return Err(HarnessError::InvalidSpec(format!(
                "dt = {dt} does not divide the final time {}",
                self.final_time
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(HarnessError::InvalidSpec(m));
        if self.n_per_dim.is_empty() || self.methods.is_empty() || self.dts.is_empty() {
            return invalid("n_per_dim, methods and dts must be nonempty".into());
        }
        if let Some(n) = self.n_per_dim.iter().find(|&&n| n < 3) {
            return invalid(format!("n_per_dim must be at least 3, got {n}"));
        }
        if let Some(dt) = self.dts.iter().find(|&&dt| !(dt > 0.0 && dt.is_finite())) {
            return invalid(format!("time steps must be positive, got {dt}"));
        }
        if !(self.final_time >= 0.0 && self.final_time.is_finite()) {
            return invalid(format!("final_time must be nonnegative, got {}", self.final_time));
        }
        for &dt in &self.dts {
            self.n_steps(dt)?;
        }
        if self.repeats == 0 || self.max_inner == 0 {
            return invalid("repeats and max_inner must be at least 1".into());
        }
        if self.methods.contains(&Method::ImexRb) {
            if self.epsilons.is_empty() || self.n_basis.is_empty() {
                return invalid("IMEX-RB needs nonempty epsilons and n_basis".into());
            }
            if self.n_basis.contains(&0) {
                return invalid("n_basis entries must be at least 1".into());
            }
            if !self.problem.is_linear() && self.epsilons.iter().any(|e| e.needs_epsilon_bar()) {
                return Err(HarnessError::NonlinearProblem(self.problem));
            }
            for e in &self.epsilons {
                let v = match *e {
                    EpsilonSpec::Absolute(v) => v,
                    EpsilonSpec::Relative { gamma } => gamma,
                };
                if !(v > 0.0 && v.is_finite()) {
                    return invalid(format!("epsilon entries must be positive, got {v}"));
                }
            }
        }
        if self.problem == ProblemId::Burgers2d && !(self.nu > 0.0) {
            return invalid(format!("nu must be positive, got {}", self.nu));
        }
        Ok(())
    }

    pub(crate) fn integrator_config(&self, dt: f64) -> Result<IntegratorConfig> {
        let s = &self.solver;
        Ok(IntegratorConfig {
            dt,
            n_steps: self.n_steps(dt)?,
            max_inner: self.max_inner,
            delta_rcond: s.delta_rcond,
            newton_tol_factor: s.newton_tol_factor,
            newton_maxit: s.newton_maxit,
            gmres_rtol: s.gmres_rtol,
            gmres_maxit: s.gmres_maxit,
            ilu_droptol: s.ilu_droptol,
            divergence_factor: s.divergence_factor,
            stop_on_divergence: true,
            keep_states: false,
            ..IntegratorConfig::default()
        })
    }
}
