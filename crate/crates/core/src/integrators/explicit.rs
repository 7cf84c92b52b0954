use crate::linalg::vector::axpy;
use crate::problem::SemidiscreteSystem;

/// Forward Euler: `u_{n+1} = u_n + dt f(t_n, u_n)`.
pub fn fe_step(sys: &dyn SemidiscreteSystem, t_n: f64, u_n: &[f64], dt: f64) -> Vec<f64> {
    let f = sys.eval(t_n, u_n);
    let mut next = u_n.to_vec();
    axpy(dt, &f, &mut next);
    next
}
