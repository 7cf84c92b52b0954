//! The sparse kernels on their own: assemble a 2D convection-diffusion
//! matrix, then solve with GMRES with and without ILU preconditioning.
//!
//! cargo run --release --example sparse_solvers

use imexrb::linalg::{gmres, ilu_factor, GmresOptions, TripletBuilder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 60;
    let n = m * m;
    let h = 1.0 / (m + 1) as f64;
    let (diff, adv) = (1.0 / (h * h), 20.0 / (2.0 * h));
    let mut b = TripletBuilder::with_capacity(n, n, 5 * n);
    for i in 0..m {
        for j in 0..m {
            let k = i * m + j;
            b.push(k, k, 1.0 + 4.0 * diff);
            if j > 0 {
                b.push(k, k - 1, -diff - adv);
            }
            if j + 1 < m {
                b.push(k, k + 1, -diff + adv);
            }
            if i > 0 {
                b.push(k, k - m, -diff);
            }
            if i + 1 < m {
                b.push(k, k + m, -diff);
            }
        }
    }
    let a = b.build();
    let rhs = vec![1.0; n];
    let opts = GmresOptions {
        rtol: 1e-10,
        max_iter: 2000,
    };

    let plain = gmres(&a, &rhs, None, &opts)?;
    println!("GMRES:       {} iterations, residual {:.2e}", plain.iterations, plain.relative_residual);
    for droptol in [1e-2, 1e-4] {
        let ilu = ilu_factor(&a, droptol)?;
        let pre = gmres(&a, &rhs, Some(&ilu), &opts)?;
        println!(
            "GMRES+ILU({droptol:.0e}): {} iterations, residual {:.2e}, fill {}",
            pre.iterations,
            pre.relative_residual,
            ilu.fill()
        );
    }
    Ok(())
}
