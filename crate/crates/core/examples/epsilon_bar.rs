//! Tolerance proxy `K_2(A)^{-1}` for the linear benchmarks, from Lanczos
//! estimates of the extreme singular values.
//!
//! cargo run --release --example epsilon_bar

use imexrb::harness::{build_problem, ProblemId};
use imexrb::linalg::singular_value_bounds;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (problem, n) in [(ProblemId::AdvDiff2d, 51), (ProblemId::AdvDiff2d, 101), (ProblemId::AdvDiff3d, 21)] {
        let bench = build_problem(problem, n)?;
        let a = bench.system.linear_operator().expect("linear benchmark");
        let est = singular_value_bounds(a, 1e-2)?;
        println!(
            "{problem} n={n}: sigma_min = {:.4e}, sigma_max = {:.4e}, epsilon_bar = {:.4e}",
            est.sigma_min,
            est.sigma_max,
            1.0 / est.cond()
        );
    }
    Ok(())
}
