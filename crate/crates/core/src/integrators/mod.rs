//! Time integrators for `y' = f(t, y)`: forward Euler, backward Euler with a
//! frozen-Jacobian quasi-Newton iteration, and IMEX-RB (a reduced implicit
//! step followed by a full-order explicit step, with the reduced basis
//! enriched until the stability criterion holds).

mod explicit;
mod imexrb;
mod implicit;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::vector::{all_finite, norm2};
use crate::linalg::{cond2_estimate, CsrMatrix, LinalgError};
use crate::problem::SemidiscreteSystem;

pub use explicit::fe_step;
pub use imexrb::{imexrb_step, imexrb_step_detailed, reduced_implicit_solve, BasisState, ImexRbStep, ReducedSolve};
pub use implicit::{be_step, BackwardEuler};

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("state has length {found}, system expects {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("quasi-Newton did not converge in {iterations} iterations (last update {update:.3e})")]
    NewtonNotConverged { iterations: usize, update: f64 },
    #[error("GMRES did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    GmresNotConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<IntegratorError>,
    },
}

impl IntegratorError {
    fn at_step(self, step: usize) -> Self {
        match self {
            e @ IntegratorError::AtStep { .. } => e,
            e => IntegratorError::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, IntegratorError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "FE")]
    ForwardEuler,
    #[serde(rename = "BE")]
    BackwardEuler,
    #[serde(rename = "IMEXRB")]
    ImexRb,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ForwardEuler => "FE",
            Method::BackwardEuler => "BE",
            Method::ImexRb => "IMEXRB",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace(['-', '_'], "").as_str() {
            "FE" => Ok(Method::ForwardEuler),
            "BE" => Ok(Method::BackwardEuler),
            "IMEXRB" => Ok(Method::ImexRb),
            _ => Err(format!("unknown method '{s}' (expected FE, BE or IMEXRB)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Stability tolerance on `||(I - V V^T) u|| / ||u||`.
    pub epsilon: f64,
    /// Snapshot window size `N`.
    pub n_basis: usize,
    /// Inner-iteration cap `M`.
    pub max_inner: usize,
    /// Reciprocal-condition guard for window updates.
    pub delta_rcond: f64,
    /// Quasi-Newton stops once the update norm drops below this times `dt`.
    pub newton_tol_factor: f64,
    pub newton_maxit: usize,
    pub gmres_rtol: f64,
    pub gmres_maxit: usize,
    pub ilu_droptol: f64,
    /// A run is flagged diverged once `||u_n||` exceeds this multiple of
    /// `||u_0||` or a non-finite value appears.
    pub divergence_factor: f64,
    pub stop_on_divergence: bool,
    /// Keep every state in the trajectory; otherwise only the last one.
    pub keep_states: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            n_steps: 100,
            epsilon: 1e-2,
            n_basis: 10,
            max_inner: 100,
            delta_rcond: 1e-8,
            newton_tol_factor: 1e-3,
            newton_maxit: 100,
            gmres_rtol: 1e-10,
            gmres_maxit: 1000,
            ilu_droptol: 5e-3,
            divergence_factor: 1e12,
            stop_on_divergence: true,
            keep_states: true,
        }
    }
}

impl IntegratorConfig {
    /// Uniform steps covering `[0, final_time]`.
    pub fn for_interval(final_time: f64, n_steps: usize) -> Self {
        Self {
            dt: final_time / n_steps.max(1) as f64,
            n_steps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("delta_rcond", self.delta_rcond),
            ("newton_tol_factor", self.newton_tol_factor),
            ("gmres_rtol", self.gmres_rtol),
            ("divergence_factor", self.divergence_factor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(IntegratorError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(IntegratorError::InvalidConfig(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.ilu_droptol >= 0.0) {
            return Err(IntegratorError::InvalidConfig("ilu_droptol must be nonnegative".into()));
        }
        for (name, v) in [
            ("n_basis", self.n_basis),
            ("max_inner", self.max_inner),
            ("newton_maxit", self.newton_maxit),
            ("gmres_maxit", self.gmres_maxit),
        ] {
            if v == 0 {
                return Err(IntegratorError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    pub(crate) fn newton_tol(&self) -> f64 {
        self.newton_tol_factor * self.dt
    }
}

/// Work counters, accumulated per step and per run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Calls to the full-order Jacobian.
    pub jacobian_assemblies: usize,
    pub f_evals: usize,
    /// Full-order Jacobian-vector products.
    pub jacobian_matvecs: usize,
    pub newton_iterations: usize,
    pub gmres_iterations: usize,
    pub max_reduced_dim: usize,
}

impl Counters {
    pub fn accumulate(&mut self, other: &Counters) {
        self.jacobian_assemblies += other.jacobian_assemblies;
        self.f_evals += other.f_evals;
        self.jacobian_matvecs += other.jacobian_matvecs;
        self.newton_iterations += other.newton_iterations;
        self.gmres_iterations += other.gmres_iterations;
        self.max_reduced_dim = self.max_reduced_dim.max(other.max_reduced_dim);
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepRecord {
    /// Index `n + 1` of the computed state.
    pub step: usize,
    pub time: f64,
    /// Inner iterations used (IMEX-RB), 1 for the other methods.
    pub inner_iterations: usize,
    /// Final `||(I - V V^T) u_{n+1}|| / ||u_{n+1}||` (IMEX-RB only).
    pub residual_ratio: f64,
    /// The inner loop hit `max_inner` without meeting the criterion.
    pub exhausted: bool,
    /// Quasi-Newton iterations of each inner iteration (one entry for BE).
    pub newton_iterations: Vec<usize>,
    /// Window size after the step (IMEX-RB only).
    pub window_size: usize,
    /// Whether `u_{n+1}` entered the snapshot window.
    pub snapshot_inserted: bool,
    pub wall_time: Duration,
    pub counters: Counters,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `u_0 ... u_{N_t}` when states are kept, else the last state only.
    pub states: Vec<Vec<f64>>,
    pub records: Vec<StepRecord>,
    /// First step at which the divergence sentinel fired.
    pub diverged_at: Option<usize>,
    pub totals: Counters,
    pub wall_time: Duration,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("a trajectory always holds a state")
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn mean_inner_iterations(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.inner_iterations as f64).sum::<f64>() / self.records.len() as f64
    }

    pub fn max_inner_iterations(&self) -> usize {
        self.records.iter().map(|r| r.inner_iterations).max().unwrap_or(0)
    }

    pub fn exhausted_steps(&self) -> usize {
        self.records.iter().filter(|r| r.exhausted).count()
    }
}

/// Integrates `N_t` steps from `u_0` at `t = 0`, storing states per
/// `cfg.keep_states`.
pub fn integrate(sys: &dyn SemidiscreteSystem, u0: &[f64], method: Method, cfg: &IntegratorConfig) -> Result<Trajectory> {
    integrate_observed(sys, u0, method, cfg, |_, _, _| {})
}

/// Like [`integrate`], calling `observer(n, t_n, u_n)` for `n = 0..=N_t`
/// (stopping early on divergence).
pub fn integrate_observed<F>(
    sys: &dyn SemidiscreteSystem,
    u0: &[f64],
    method: Method,
    cfg: &IntegratorConfig,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, f64, &[f64]),
{
    cfg.validate()?;
    if u0.len() != sys.n_dof() {
        return Err(IntegratorError::ShapeMismatch {
            expected: sys.n_dof(),
            found: u0.len(),
        });
    }
    let start = Instant::now();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![u0.to_vec()],
        ..Trajectory::default()
    };
    observer(0, 0.0, u0);
    let reference = match norm2(u0) {
        n if n > 0.0 => n,
        _ => 1.0,
    };
    let mut u = u0.to_vec();
    let mut basis = (method == Method::ImexRb).then(|| BasisState::new(u0, cfg.n_basis));
    let mut be = BackwardEuler::new();

    for n in 0..cfg.n_steps {
        let t_n = n as f64 * cfg.dt;
        let t_next = (n + 1) as f64 * cfg.dt;
        let step_start = Instant::now();
        let (next, mut record) = match method {
            Method::ForwardEuler => {
                let next = fe_step(sys, t_n, &u, cfg.dt);
                let record = StepRecord {
                    inner_iterations: 1,
                    counters: Counters {
                        f_evals: 1,
                        ..Counters::default()
                    },
                    ..StepRecord::default()
                };
                (next, record)
            }
            Method::BackwardEuler => be.step(sys, t_next, &u, cfg).map_err(|e| e.at_step(n + 1))?,
            Method::ImexRb => {
                let basis = basis.as_mut().expect("basis exists for IMEX-RB");
                imexrb_step(sys, t_next, &u, basis, cfg).map_err(|e| e.at_step(n + 1))?
            }
        };
        record.step = n + 1;
        record.time = t_next;
        record.wall_time = step_start.elapsed();
        traj.totals.accumulate(&record.counters);
        traj.records.push(record);
        u = next;
        traj.times.push(t_next);
        if cfg.keep_states {
            traj.states.push(u.clone());
        } else {
            traj.states[0].clone_from(&u);
        }
        observer(n + 1, t_next, &u);
        if !all_finite(&u) || norm2(&u) > cfg.divergence_factor * reference {
            if traj.diverged_at.is_none() {
                log::debug!("{method} diverged at step {}", n + 1);
                traj.diverged_at = Some(n + 1);
            }
            if cfg.stop_on_divergence {
                break;
            }
        }
    }
    if !cfg.keep_states {
        traj.times = vec![*traj.times.last().unwrap()];
    }
    traj.wall_time = start.elapsed();
    Ok(traj)
}

/// Stability tolerance `epsilon = gamma * K_2(A)^{-1}` for a linear system
/// matrix, with the condition number estimated to 1% relative accuracy.
pub fn scaled_epsilon(a: &CsrMatrix, gamma: f64) -> Result<f64> {
    let eps = gamma / cond2_estimate(a, 1e-2)?;
    Ok(eps.min(1.0))
}
