use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;

use super::spec::ExperimentSpec;
use super::{build_problem_with_nu, epsilon_bar_of, HarnessError, Result};
use crate::integrators::{integrate_observed, Counters, IntegratorConfig, Method, Trajectory};
use crate::metrics::{state_norms, ErrorAccumulator, ErrorSeries, MetricsError};
use crate::problem::Benchmark;

/// Errors and work statistics of one integration against the exact solution.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub series: ErrorSeries,
    pub trajectory: Trajectory,
}

/// Integrates `bench` from its exact initial state and measures the
/// relative error at every step.
pub fn evaluate(bench: &Benchmark, method: Method, cfg: &IntegratorConfig) -> Result<Evaluation> {
    let u0 = bench.initial_condition();
    let k = bench.exact.n_components();
    let mut acc = ErrorAccumulator::new(k, cfg.dt);
    let mut failure: Option<MetricsError> = None;
    let trajectory = integrate_observed(bench.system.as_ref(), &u0, method, cfg, |n, t, u| {
        if n == 0 || failure.is_some() {
            return;
        }
        let pushed = state_norms(u, bench.exact.as_ref(), &bench.lifting, t).and_then(|norms| acc.push(&norms));
        if let Err(e) = pushed {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let series = if acc.is_empty() {
        ErrorSeries::default()
    } else {
        acc.finish()?
    };
    Ok(Evaluation { series, trajectory })
}

/// One cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n_per_dim: usize,
    pub method: Method,
    pub dt: f64,
    /// Resolved tolerance (IMEX-RB only).
    pub epsilon: Option<f64>,
    pub n_basis: Option<usize>,
}

impl std::fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} n={} dt={}", self.method, self.n_per_dim, self.dt)?;
        if let (Some(e), Some(n)) = (self.epsilon, self.n_basis) {
            write!(f, " eps={e:.3e} N={n}")?;
        }
        Ok(())
    }
}

/// One output line: a sweep point with its errors and counters.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub problem: String,
    pub point: SweepPoint,
    pub h: f64,
    pub n_steps: usize,
    pub max_inner: Option<usize>,
    pub aggregate_error: f64,
    pub final_error: f64,
    pub mean_inner_iterations: f64,
    pub max_inner_iterations: usize,
    pub exhausted_steps: usize,
    /// Mean over repeats of the `integrate` wall time.
    pub wall_time: Duration,
    pub diverged_at: Option<usize>,
    pub counters: Counters,
    pub seed: u64,
    pub repeats: usize,
}

/// Per-step line of the optional step log.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLogRow {
    pub problem: String,
    pub point: SweepPoint,
    pub step: usize,
    pub time: f64,
    pub relative_error: f64,
    pub inner_iterations: usize,
    pub residual_ratio: f64,
    pub exhausted: bool,
    pub window_size: usize,
}

#[derive(Debug, Default)]
pub struct ExperimentOutcome {
    /// Rows of the successful points, in sweep order.
    pub rows: Vec<ResultRow>,
    pub step_log: Vec<StepLogRow>,
    pub failures: Vec<(SweepPoint, HarnessError)>,
    /// `K_2(A)^{-1}` per grid, when it was needed.
    pub epsilon_bars: Vec<(usize, f64)>,
}

/// Expands the sweep in a fixed order: grid, method, dt, epsilon, N.
fn sweep_points(spec: &ExperimentSpec, epsilon_bars: &HashMap<usize, f64>) -> Vec<SweepPoint> {
    let mut points = Vec::new();
    for &n_per_dim in &spec.n_per_dim {
        for &method in &spec.methods {
            for &dt in &spec.dts {
                if method != Method::ImexRb {
                    points.push(SweepPoint {
                        n_per_dim,
                        method,
                        dt,
                        epsilon: None,
                        n_basis: None,
                    });
                    continue;
                }
                for eps in &spec.epsilons {
                    let epsilon = eps.resolve(epsilon_bars.get(&n_per_dim).copied());
                    for &n_basis in &spec.n_basis {
                        points.push(SweepPoint {
                            n_per_dim,
                            method,
                            dt,
                            epsilon,
                            n_basis: Some(n_basis),
                        });
                    }
                }
            }
        }
    }
    points
}

/// Runs every sweep point (in parallel) and collects rows in sweep order.
/// Results do not depend on the thread count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let mut benches = HashMap::new();
    let mut epsilon_bars = HashMap::new();
    let needs_bar = spec.methods.contains(&Method::ImexRb) && spec.epsilons.iter().any(|e| e.needs_epsilon_bar());
    for &n in &spec.n_per_dim {
        let bench = Arc::new(build_problem_with_nu(spec.problem, n, spec.nu)?);
        if needs_bar {
            let bar = epsilon_bar_of(&bench, spec.problem, spec.seed)?;
            log::info!("{} n={n}: epsilon_bar = {bar:.4e}", spec.problem);
            epsilon_bars.insert(n, bar);
        }
        benches.insert(n, bench);
    }
    let points = sweep_points(spec, &epsilon_bars);
    let results: Vec<(SweepPoint, Result<PointOutput>)> = points
        .par_iter()
        .map(|&p| (p, run_point(spec, &benches[&p.n_per_dim], p)))
        .collect();

    let mut outcome = ExperimentOutcome::default();
    for &n in &spec.n_per_dim {
        if let Some(&bar) = epsilon_bars.get(&n) {
            outcome.epsilon_bars.push((n, bar));
        }
    }
    for (point, result) in results {
        match result {
            Ok((row, steps)) => {
                outcome.rows.push(row);
                outcome.step_log.extend(steps);
            }
            Err(e) => {
                log::error!("{point}: {e}");
                outcome.failures.push((point, e));
            }
        }
    }
    Ok(outcome)
}

type PointOutput = (ResultRow, Vec<StepLogRow>);

fn run_point(spec: &ExperimentSpec, bench: &Benchmark, p: SweepPoint) -> Result<PointOutput> {
    let mut cfg = spec.integrator_config(p.dt)?;
    if p.method == Method::ImexRb {
        let eps = p
            .epsilon
            .ok_or_else(|| HarnessError::InvalidSpec("unresolved epsilon".into()))?;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(HarnessError::InvalidSpec(format!("epsilon {eps} is outside (0, 1]")));
        }
        cfg.epsilon = eps;
        cfg.n_basis = p.n_basis.unwrap_or(cfg.n_basis);
    }
    let mut total = Duration::ZERO;
    let mut last = None;
    for _ in 0..spec.repeats {
        let eval = evaluate(bench, p.method, &cfg)?;
        total += eval.trajectory.wall_time;
        last = Some(eval);
    }
    let eval = last.expect("repeats is at least 1");
    let traj = &eval.trajectory;
    log::debug!("{p}: aggregate error {:.4e}", eval.series.aggregate);

    let problem = spec.problem.label().to_string();
    let row = ResultRow {
        problem: problem.clone(),
        point: p,
        h: bench.grid.h(),
        n_steps: cfg.n_steps,
        max_inner: (p.method == Method::ImexRb).then_some(cfg.max_inner),
        aggregate_error: eval.series.aggregate,
        final_error: eval.series.final_step().unwrap_or(0.0),
        mean_inner_iterations: traj.mean_inner_iterations(),
        max_inner_iterations: traj.max_inner_iterations(),
        exhausted_steps: traj.exhausted_steps(),
        wall_time: total / spec.repeats as u32,
        diverged_at: traj.diverged_at,
        counters: traj.totals,
        seed: spec.seed,
        repeats: spec.repeats,
    };
    let steps = if spec.step_log.is_some() {
        traj.records
            .iter()
            .zip(&eval.series.per_step)
            .map(|(r, &e)| StepLogRow {
                problem: problem.clone(),
                point: p,
                step: r.step,
                time: r.time,
                relative_error: e,
                inner_iterations: r.inner_iterations,
                residual_ratio: r.residual_ratio,
                exhausted: r.exhausted,
                window_size: r.window_size,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok((row, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{EpsilonSpec, ProblemId, SolverOptions};

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            name: "small".into(),
            problem: ProblemId::AdvDiff2d,
            n_per_dim: vec![11],
            methods: vec![Method::BackwardEuler, Method::ImexRb],
            dts: vec![0.25, 0.125],
            final_time: 1.0,
            epsilons: vec![EpsilonSpec::Absolute(1e-2), EpsilonSpec::Relative { gamma: 1.0 }],
            n_basis: vec![2, 4],
            max_inner: 20,
            nu: 1e-2,
            seed: 0,
            repeats: 1,
            solver: SolverOptions::default(),
            output: None,
            step_log: Some("steps.csv".into()),
        }
    }

    #[test]
    fn sweep_order_and_count() {
        let outcome = run_experiment(&small_spec()).unwrap();
        assert!(outcome.failures.is_empty());
        // BE: 2 dts; IMEX-RB: 2 dts x 2 epsilons x 2 N.
        assert_eq!(outcome.rows.len(), 2 + 8);
        assert_eq!(outcome.rows[0].point.method, Method::BackwardEuler);
        assert_eq!(outcome.rows[2].point.n_basis, Some(2));
        assert_eq!(outcome.rows[3].point.n_basis, Some(4));
        assert_eq!(outcome.step_log.len(), 4 + 8 + 4 * (4 + 8));
        assert_eq!(outcome.epsilon_bars.len(), 1);
    }

    #[test]
    fn zero_steps_give_zero_error() {
        let mut spec = small_spec();
        spec.final_time = 0.0;
        let outcome = run_experiment(&spec).unwrap();
        for row in &outcome.rows {
            assert_eq!(row.aggregate_error, 0.0);
            assert_eq!(row.final_error, 0.0);
            assert_eq!(row.max_inner_iterations, 0);
        }
    }

    #[test]
    fn parallel_runs_are_deterministic() {
        let a = run_experiment(&small_spec()).unwrap();
        let b = run_experiment(&small_spec()).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.aggregate_error.to_bits(), y.aggregate_error.to_bits());
            assert_eq!(x.counters, y.counters);
        }
    }
}
