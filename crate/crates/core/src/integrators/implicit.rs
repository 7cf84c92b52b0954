use crate::linalg::vector::{axpy, norm2};
use crate::linalg::{gmres, ilu_factor, CsrMatrix, GmresOptions, IluPrecond};
use crate::problem::SemidiscreteSystem;

use super::{Counters, IntegratorConfig, IntegratorError, Result, StepRecord};

/// Backward Euler solver. For linear systems the iteration matrix
/// `I - dt A` and its ILU factors are reused while `dt` is unchanged.
#[derive(Default)]
pub struct BackwardEuler {
    cached: Option<(f64, CsrMatrix, IluPrecond)>,
}

impl BackwardEuler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Solves `u = u_n + dt f(t_{n+1}, u)` by quasi-Newton with the matrix
    /// `I - dt J(t_{n+1}, u_n)` frozen for the whole step; each update is a
    /// preconditioned GMRES solve. Linear systems take exactly one update.
    pub fn step(
        &mut self,
        sys: &dyn SemidiscreteSystem,
        t_next: f64,
        u_n: &[f64],
        cfg: &IntegratorConfig,
    ) -> Result<(Vec<f64>, StepRecord)> {
        let mut counters = Counters::default();
        let linear = sys.is_linear();
        let reuse = linear && matches!(&self.cached, Some((dt, ..)) if *dt == cfg.dt);
        if !reuse {
            let jac = sys.jacobian(t_next, u_n);
            counters.jacobian_assemblies += 1;
            let m = jac.shifted(1.0, -cfg.dt);
            let ilu = ilu_factor(&m, cfg.ilu_droptol)?;
            self.cached = Some((cfg.dt, m, ilu));
        }
        let (_, m, ilu) = self.cached.as_ref().expect("iteration matrix was just built");
        let opts = GmresOptions {
            rtol: cfg.gmres_rtol,
            max_iter: cfg.gmres_maxit,
        };

        let mut u = u_n.to_vec();
        let mut last_update = f64::INFINITY;
        for it in 1..=cfg.newton_maxit {
            // Residual of u - u_n - dt f(t_{n+1}, u) = 0, negated.
            let mut rhs = sys.eval(t_next, &u);
            counters.f_evals += 1;
            rhs.iter_mut().for_each(|x| *x *= cfg.dt);
            for ((r, un), ui) in rhs.iter_mut().zip(u_n).zip(&u) {
                *r += un - ui;
            }
            let out = gmres(m, &rhs, Some(ilu), &opts)?;
            counters.gmres_iterations += out.iterations;
            if !out.converged {
                return Err(IntegratorError::GmresNotConverged {
                    iterations: out.iterations,
                    residual: out.relative_residual,
                });
            }
            axpy(1.0, &out.x, &mut u);
            last_update = norm2(&out.x);
            if linear || last_update < cfg.newton_tol() {
                counters.newton_iterations = it;
                let record = StepRecord {
                    inner_iterations: 1,
                    newton_iterations: vec![it],
                    counters,
                    ..StepRecord::default()
                };
                return Ok((u, record));
            }
        }
        Err(IntegratorError::NewtonNotConverged {
            iterations: cfg.newton_maxit,
            update: last_update,
        })
    }
}

/// One backward Euler step without reuse across steps.
pub fn be_step(
    sys: &dyn SemidiscreteSystem,
    t_next: f64,
    u_n: &[f64],
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, StepRecord)> {
    BackwardEuler::new().step(sys, t_next, u_n, cfg)
}
