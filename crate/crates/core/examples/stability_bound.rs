//! Spectral stability constants of a small dense system, and a check that
//! IMEX-RB with epsilon below `C_2` keeps the solution norm decaying at
//! step sizes where FE explodes.
//!
//! cargo run --release --example stability_bound

use imexrb::integrators::{integrate, IntegratorConfig, Method};
use imexrb::linalg::{vector::norm2, CsrMatrix};
use imexrb::metrics::exact_stability_bound;
use imexrb::problem::LinearSystem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 1D Laplacian-like symmetric negative-definite matrix.
    let n: usize = 20;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => -2.0,
                    1 => 1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let bound = exact_stability_bound(&rows)?;
    println!(
        "mu_min = {:.4e}, mu_max = {:.4e}, K2(T) = {:.3}, C2 = {:.4e}",
        bound.mu_min, bound.mu_max, bound.k2_t, bound.c2
    );

    let sys = LinearSystem::homogeneous(CsrMatrix::from_dense(&rows));
    let u0: Vec<f64> = (0..n).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
    let cfg = IntegratorConfig {
        dt: 10.0,
        n_steps: 50,
        epsilon: 0.5 * bound.c2,
        n_basis: 3,
        ..IntegratorConfig::default()
    };
    for method in [Method::ForwardEuler, Method::ImexRb] {
        let traj = integrate(&sys, &u0, method, &cfg)?;
        let norms: Vec<f64> = traj.states.iter().map(|u| norm2(u)).collect();
        let monotone = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        println!(
            "{method}: steps {}, diverged {}, monotone decay {monotone}, final norm {:.3e}",
            traj.records.len(),
            traj.diverged(),
            norms.last().copied().unwrap_or(0.0)
        );
    }
    Ok(())
}
