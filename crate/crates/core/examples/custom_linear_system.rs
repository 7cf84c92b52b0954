//! Integrating a user-defined forced linear system `u' = A u + g(t)` with
//! all three methods and comparing against a reference BE run on a finer step.
//!
//! cargo run --release --example custom_linear_system

use imexrb::integrators::{integrate, IntegratorConfig, Method};
use imexrb::linalg::{vector::norm2, vector::sub, TripletBuilder};
use imexrb::problem::LinearSystem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Stiff upwinded transport-diffusion chain.
    let n = 200;
    let mut b = TripletBuilder::new(n, n);
    for i in 0..n {
        b.push(i, i, -2.0e4 - 50.0);
        if i > 0 {
            b.push(i, i - 1, 1.0e4 + 50.0);
        }
        if i + 1 < n {
            b.push(i, i + 1, 1.0e4);
        }
    }
    let sys = LinearSystem::with_forcing(b.build(), move |t| {
        (0..n).map(|i| (std::f64::consts::PI * i as f64 / n as f64).sin() * t.cos()).collect()
    });
    let u0 = vec![0.0; n];

    let reference = integrate(&sys, &u0, Method::BackwardEuler, &IntegratorConfig::for_interval(1.0, 4096))?;
    let u_ref = reference.final_state().to_vec();
    for method in [Method::ForwardEuler, Method::BackwardEuler, Method::ImexRb] {
        let cfg = IntegratorConfig {
            epsilon: 1e-3,
            ..IntegratorConfig::for_interval(1.0, 64)
        };
        let traj = integrate(&sys, &u0, method, &cfg)?;
        if traj.diverged() {
            println!("{method}: diverged at step {:?}", traj.diverged_at);
            continue;
        }
        let err = norm2(&sub(traj.final_state(), &u_ref)) / norm2(&u_ref);
        println!(
            "{method}: relative difference to reference {err:.3e}, mean inner iterations {:.2}",
            traj.mean_inner_iterations()
        );
    }
    Ok(())
}
