//! Burgers at a step size far beyond the explicit limit: FE blows up, BE
//! and IMEX-RB stay bounded, and the IMEX-RB error depends on epsilon.
//!
//! cargo run --release --example burgers_stability [n_per_dim]

use imexrb::harness::{build_problem, evaluate, ProblemId};
use imexrb::integrators::{IntegratorConfig, Method};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(51);
    let bench = build_problem(ProblemId::Burgers2d, n)?;
    let base = IntegratorConfig {
        keep_states: false,
        ..IntegratorConfig::for_interval(1.0, 40)
    };

    let fe = evaluate(&bench, Method::ForwardEuler, &base)?;
    println!("FE diverged at step {:?}", fe.trajectory.diverged_at);
    let be = evaluate(&bench, Method::BackwardEuler, &base)?;
    println!(
        "BE first-step error {:.3e}, final error {:.3e}",
        be.series.per_step[0],
        be.series.final_step().unwrap_or(0.0)
    );

    for epsilon in [1e-2, 1e-3, 1e-4, 1e-5] {
        let cfg = IntegratorConfig { epsilon, ..base };
        let rb = evaluate(&bench, Method::ImexRb, &cfg)?;
        println!(
            "IMEX-RB eps = {epsilon:.0e}: first-step error {:.3e}, final error {:.3e}, mean inner {:.2}, jacobians {}",
            rb.series.per_step[0],
            rb.series.final_step().unwrap_or(0.0),
            rb.trajectory.mean_inner_iterations(),
            rb.trajectory.totals.jacobian_assemblies,
        );
    }
    Ok(())
}
