//! IMEX-RB step.
//!
//! The reduced implicit problem is solved for the coordinates
//! `z = V^T u_{n+1}` of
//!
//! ```text
//! z = V^T u_n + dt V^T f(t_{n+1}, V z),
//! ```
//!
//! and the explicit update is `u_{n+1} = u_n + dt f(t_{n+1}, V z)`. With
//! `delta = z - V^T u_n` this is the projected backward Euler step in
//! increment form whenever `u_n` lies in `span(V)`, and in every case the
//! accepted state satisfies `u_{n+1} = u_n + dt f(t_{n+1}, V V^T u_{n+1})`
//! exactly (up to the reduced solve tolerance).

use std::borrow::Cow;

use crate::linalg::vector::{axpy, dot, norm2};
use crate::linalg::{dense_solve, gs_extend, orth_residual, CsrMatrix, DenseMatrix, OrthoBasis, QrFactor};
use crate::problem::SemidiscreteSystem;

use super::{Counters, IntegratorConfig, IntegratorError, Result, StepRecord};

/// Snapshot window: a QR factorization spanning up to `N` recent accepted
/// states. Inner iterates never enter it.
#[derive(Debug, Clone)]
pub struct BasisState {
    window: QrFactor,
    n_basis: usize,
}

impl BasisState {
    /// Window holding the normalized initial state, or `e_1` when the
    /// initial state is numerically zero.
    pub fn new(u0: &[f64], n_basis: usize) -> Self {
        assert!(n_basis >= 1, "window must hold at least one snapshot");
        Self {
            window: QrFactor::init(u0),
            n_basis,
        }
    }

    pub fn window(&self) -> &QrFactor {
        &self.window
    }

    pub fn basis(&self) -> &OrthoBasis {
        self.window.q()
    }

    pub fn len(&self) -> usize {
        self.window.n_cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn capacity(&self) -> usize {
        self.n_basis
    }

    /// Appends an accepted state, dropping the oldest snapshot when the
    /// window overflows. Returns whether the state was inserted.
    pub fn advance(&mut self, u: &[f64], delta: f64) -> bool {
        let inserted = self.window.append(u, delta);
        if inserted && self.window.n_cols() > self.n_basis {
            self.window.remove_oldest();
        }
        inserted
    }
}

/// `V`, the cached products `J V` and `G = V^T J V` for a Jacobian frozen
/// over one time step. Extending `V` by one column costs one matvec.
struct ProjectedJacobian<'a> {
    jac: Cow<'a, CsrMatrix>,
    v: OrthoBasis,
    jv: Vec<Vec<f64>>,
    g: DenseMatrix,
}

impl<'a> ProjectedJacobian<'a> {
    fn new(jac: Cow<'a, CsrMatrix>, v: OrthoBasis, counters: &mut Counters) -> Self {
        let mut out = Self {
            jac,
            v: OrthoBasis::empty(v.n_rows()),
            jv: Vec::new(),
            g: DenseMatrix::zeros(0, 0),
        };
        for col in v.into_columns() {
            out.push_column(col, counters);
        }
        out
    }

    fn dim(&self) -> usize {
        self.v.n_cols()
    }

    /// Appends an orthonormal column and extends the caches.
    fn push_column(&mut self, col: Vec<f64>, counters: &mut Counters) {
        let mut basis = std::mem::replace(&mut self.v, OrthoBasis::empty(0)).into_columns();
        basis.push(col);
        self.v = OrthoBasis::from_columns_unchecked(self.jac.n_rows(), basis);
        self.sync_last(counters);
    }

    /// Extends the caches after a column was appended to `self.v`.
    fn sync_last(&mut self, counters: &mut Counters) {
        let m = self.v.n_cols() - 1;
        let new_col = self.v.column(m);
        let jv_new = self.jac.mul_vec(new_col);
        counters.jacobian_matvecs += 1;
        self.g.resize(m + 1, m + 1);
        for i in 0..m {
            self.g[(i, m)] = dot(self.v.column(i), &jv_new);
            self.g[(m, i)] = dot(new_col, &self.jv[i]);
        }
        self.g[(m, m)] = dot(new_col, &jv_new);
        self.jv.push(jv_new);
    }

    /// `I - dt G`.
    fn iteration_matrix(&self, dt: f64) -> DenseMatrix {
        let m = self.dim();
        let mut k = DenseMatrix::identity(m);
        for i in 0..m {
            for j in 0..m {
                k[(i, j)] -= dt * self.g[(i, j)];
            }
        }
        k
    }
}

/// Quasi-Newton on `z - V^T u_n - dt V^T f(t, V z) = 0` from `z`, with the
/// frozen reduced matrix. Returns the iteration count.
fn solve_projected(
    sys: &dyn SemidiscreteSystem,
    t_next: f64,
    vtu: &[f64],
    proj: &ProjectedJacobian<'_>,
    z: &mut [f64],
    cfg: &IntegratorConfig,
    counters: &mut Counters,
) -> Result<usize> {
    let k = proj.iteration_matrix(cfg.dt);
    let mut last_update = f64::INFINITY;
    for it in 1..=cfg.newton_maxit {
        let w = proj.v.combine(z);
        let fw = sys.eval(t_next, &w);
        counters.f_evals += 1;
        let vtf = proj.v.project(&fw);
        let rhs: Vec<f64> = (0..z.len()).map(|i| vtu[i] + cfg.dt * vtf[i] - z[i]).collect();
        let update = dense_solve(&k, &rhs)?;
        axpy(1.0, &update, z);
        counters.newton_iterations += 1;
        last_update = norm2(&update);
        if sys.is_linear() || last_update < cfg.newton_tol() {
            return Ok(it);
        }
    }
    Err(IntegratorError::NewtonNotConverged {
        iterations: cfg.newton_maxit,
        update: last_update,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSolve {
    /// Reduced increment `delta = V^T (u_{n+1} - u_n)`.
    pub delta: Vec<f64>,
    pub newton_iterations: usize,
}

/// Projected backward Euler step on the orthonormal basis `v`, using the
/// Jacobian at `(t_{n+1}, u_n)`.
pub fn reduced_implicit_solve(
    sys: &dyn SemidiscreteSystem,
    t_next: f64,
    u_n: &[f64],
    v: &OrthoBasis,
    cfg: &IntegratorConfig,
) -> Result<ReducedSolve> {
    let mut counters = Counters::default();
    let proj = ProjectedJacobian::new(sys.jacobian(t_next, u_n), v.clone(), &mut counters);
    let vtu = v.project(u_n);
    let mut z = vtu.clone();
    let newton_iterations = solve_projected(sys, t_next, &vtu, &proj, &mut z, cfg, &mut counters)?;
    let delta = z.iter().zip(&vtu).map(|(a, b)| a - b).collect();
    Ok(ReducedSolve {
        delta,
        newton_iterations,
    })
}

/// One IMEX-RB step from `u_n` to `t_{n+1}`.
///
/// Runs up to `max_inner` inner iterations. Each solves the reduced
/// problem on the current basis, takes the explicit full-order step and
/// accepts it once `||(I - V V^T) u|| <= epsilon ||u||`; otherwise the basis
/// is extended with the normalized residual. If the cap is reached the last
/// iterate is returned and the record is flagged `exhausted`. The window is
/// then advanced with the accepted state.
pub fn imexrb_step(
    sys: &dyn SemidiscreteSystem,
    t_next: f64,
    u_n: &[f64],
    basis: &mut BasisState,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, StepRecord)> {
    imexrb_step_detailed(sys, t_next, u_n, basis, cfg).map(|s| (s.state, s.record))
}

/// An accepted IMEX-RB step together with the basis it was accepted on.
#[derive(Debug, Clone)]
pub struct ImexRbStep {
    pub state: Vec<f64>,
    pub record: StepRecord,
    /// Window basis plus every enrichment made during the step.
    pub basis: OrthoBasis,
}

/// [`imexrb_step`], also returning the final reduced basis.
pub fn imexrb_step_detailed(
    sys: &dyn SemidiscreteSystem,
    t_next: f64,
    u_n: &[f64],
    basis: &mut BasisState,
    cfg: &IntegratorConfig,
) -> Result<ImexRbStep> {
    let mut counters = Counters::default();
    let jac = sys.jacobian(t_next, u_n);
    counters.jacobian_assemblies += 1;
    let mut proj = ProjectedJacobian::new(jac, basis.basis().clone(), &mut counters);
    let mut vtu = proj.v.project(u_n);
    let mut z = vtu.clone();
    let mut record = StepRecord::default();

    let mut u_next = Vec::new();
    for k in 0..cfg.max_inner {
        counters.max_reduced_dim = counters.max_reduced_dim.max(proj.dim());
        let its = solve_projected(sys, t_next, &vtu, &proj, &mut z, cfg, &mut counters)?;
        record.newton_iterations.push(its);

        let w = proj.v.combine(&z);
        let fw = sys.eval(t_next, &w);
        counters.f_evals += 1;
        u_next = u_n.to_vec();
        axpy(cfg.dt, &fw, &mut u_next);

        let (r, ratio) = orth_residual(&proj.v, &u_next);
        record.inner_iterations = k + 1;
        record.residual_ratio = ratio;
        if ratio <= cfg.epsilon {
            break;
        }
        if k + 1 == cfg.max_inner || gs_extend(&mut proj.v, &r).is_err() {
            record.exhausted = true;
            break;
        }
        proj.sync_last(&mut counters);
        // Warm start: keep the previous increment, zero along the new direction.
        let c = dot(proj.v.column(proj.dim() - 1), u_n);
        vtu.push(c);
        z.push(c);
    }

    record.snapshot_inserted = basis.advance(&u_next, cfg.delta_rcond);
    record.window_size = basis.len();
    record.counters = counters;
    Ok(ImexRbStep {
        state: u_next,
        record,
        basis: proj.v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::be_step;
    use crate::linalg::vector::sub;
    use crate::problem::{build_advdiff, AdvDiffParams, Grid, LinearSystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(dt: f64, epsilon: f64) -> IntegratorConfig {
        IntegratorConfig {
            dt,
            epsilon,
            ..IntegratorConfig::default()
        }
    }

    #[test]
    fn scalar_reduced_solve_closed_form() {
        let (lambda, dt, un) = (-3.0, 0.2, 1.5);
        let sys = LinearSystem::homogeneous(CsrMatrix::from_diagonal(&[lambda]));
        let v = OrthoBasis::unit(1, 0);
        let out = reduced_implicit_solve(&sys, dt, &[un], &v, &cfg(dt, 1e-2)).unwrap();
        let expected = dt * lambda * un / (1.0 - dt * lambda);
        assert!((out.delta[0] - expected).abs() < 1e-14);
    }

    #[test]
    fn scalar_step_equals_backward_euler() {
        let (lambda, dt) = (-50.0, 0.1);
        let sys = LinearSystem::homogeneous(CsrMatrix::from_diagonal(&[lambda]));
        let mut basis = BasisState::new(&[1.0], 10);
        let (u, rec) = imexrb_step(&sys, dt, &[1.0], &mut basis, &cfg(dt, 1e-6)).unwrap();
        assert!((u[0] - 1.0 / (1.0 - dt * lambda)).abs() < 1e-14);
        assert_eq!(rec.inner_iterations, 1);
    }

    #[test]
    fn zero_rhs_gives_zero_increment() {
        let sys = LinearSystem::homogeneous(CsrMatrix::zeros(3, 3));
        let v = OrthoBasis::unit(3, 1);
        let out = reduced_implicit_solve(&sys, 0.1, &[1.0, 2.0, 3.0], &v, &cfg(0.1, 1e-2)).unwrap();
        assert_eq!(out.delta, vec![0.0]);
    }

    #[test]
    fn full_basis_reproduces_backward_euler() {
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = if i == j { -4.0 } else { rng.gen_range(-0.5..0.5) };
            }
        }
        let sys = LinearSystem::with_forcing(CsrMatrix::from_dense(&rows), |t| vec![t.sin(); 8]);
        let u_n: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut q = OrthoBasis::empty(n);
        for _ in 0..n {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (r, _) = orth_residual(&q, &v);
            gs_extend(&mut q, &r).unwrap();
        }
        let c = cfg(0.3, 1e-2);
        let red = reduced_implicit_solve(&sys, 0.3, &u_n, &q, &c).unwrap();
        let mut u = q.combine(&red.delta);
        axpy(1.0, &u_n, &mut u);
        let (be, _) = be_step(&sys, 0.3, &u_n, &c).unwrap();
        assert!(norm2(&sub(&u, &be)) < 1e-9 * norm2(&be));
    }

    #[test]
    fn loose_tolerance_needs_one_inner_iteration() {
        let grid = Grid::unit(2, 11).unwrap();
        let bench = build_advdiff(&grid, AdvDiffParams::benchmark_2d()).unwrap();
        let u0 = bench.initial_condition();
        let mut basis = BasisState::new(&u0, 3);
        let (_, rec) = imexrb_step(bench.system.as_ref(), 0.1, &u0, &mut basis, &cfg(0.1, 1.0)).unwrap();
        assert_eq!(rec.inner_iterations, 1);
    }

    #[test]
    fn zero_initial_state_starts_from_first_unit_vector() {
        let basis = BasisState::new(&[0.0; 5], 4);
        assert_eq!(basis.basis().column(0), &[1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn window_keeps_at_most_n_snapshots() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut basis = BasisState::new(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 3);
        for _ in 0..10 {
            let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(basis.advance(&v, 1e-8));
            assert!(basis.len() <= 3);
            let (_, ratio) = orth_residual(basis.basis(), &v);
            assert!(ratio < 1e-12);
        }
    }
}
