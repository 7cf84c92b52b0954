//! Convergence study on the 2D advection-diffusion benchmark: BE against
//! IMEX-RB with the tolerance set to `K_2(A)^{-1}`.
//!
//! cargo run --release --example advdiff2d_convergence [n_per_dim]

use imexrb::harness::{build_problem, epsilon_bar, evaluate, ProblemId};
use imexrb::integrators::{IntegratorConfig, Method};
use imexrb::metrics::fit_slope;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(51);
    let bench = build_problem(ProblemId::AdvDiff2d, n)?;
    let eps = epsilon_bar(ProblemId::AdvDiff2d, n)?;
    println!("grid {n}x{n}, h = {:.4}, epsilon_bar = {eps:.3e}", bench.grid.h());

    let dts: Vec<f64> = (4..=9).map(|i| 2f64.powi(-i)).collect();
    for method in [Method::BackwardEuler, Method::ImexRb] {
        let mut errors = Vec::new();
        println!("\n{method}");
        for &dt in &dts {
            let cfg = IntegratorConfig {
                epsilon: eps,
                keep_states: false,
                ..IntegratorConfig::for_interval(1.0, (1.0 / dt).round() as usize)
            };
            let eval = evaluate(&bench, method, &cfg)?;
            println!(
                "  dt = {dt:.3e}  error = {:.4e}  mean inner = {:.2}",
                eval.series.aggregate,
                eval.trajectory.mean_inner_iterations()
            );
            errors.push(eval.series.aggregate);
        }
        let k = dts.len() - 4;
        println!("  slope over the four smallest dt: {:.3}", fit_slope(&dts[k..], &errors[k..])?);
    }
    Ok(())
}
