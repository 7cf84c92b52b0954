//! Randomized invariants.

use imexrb::integrators::{imexrb_step_detailed, integrate, BasisState, IntegratorConfig, Method};
use imexrb::linalg::vector::{dot, norm2};
use imexrb::linalg::{gmres, gs_extend, orth_residual, CsrMatrix, GmresOptions, OrthoBasis, QrFactor, TripletBuilder};
use imexrb::metrics::{component_norms, exact_stability_bound};
use imexrb::problem::LinearSystem;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn orthonormality_defect(q: &OrthoBasis) -> f64 {
    let k = q.n_cols();
    let mut sum = 0.0;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            sum += (dot(q.column(i), q.column(j)) - target).powi(2);
        }
    }
    sum.sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_window_stays_orthonormal(seed in any::<u64>(), n in 5usize..60, ops in 1usize..40, cap in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut qr = QrFactor::init(&random_vec(&mut rng, n));
        for _ in 0..ops {
            // Mix fresh directions with near-collinear ones.
            let v = if rng.gen_bool(0.3) {
                let mut v = qr.q().column(0).to_vec();
                v[0] += 1e-12;
                v
            } else {
                random_vec(&mut rng, n)
            };
            qr.append(&v, 1e-8);
            if qr.n_cols() > cap {
                qr.remove_oldest();
            }
            prop_assert!(orthonormality_defect(qr.q()) <= 1e-10 * n as f64);
            prop_assert!(qr.n_cols() <= cap.max(1).min(n));
        }
    }

    #[test]
    fn orth_residual_splits_norm(seed in any::<u64>(), n in 2usize..80, k in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = OrthoBasis::empty(n);
        for _ in 0..k.min(n) {
            let (r, _) = orth_residual(&q, &random_vec(&mut rng, n));
            gs_extend(&mut q, &r).unwrap();
        }
        let u: Vec<f64> = random_vec(&mut rng, n).iter().map(|x| x * 10f64.powi(rng.gen_range(-3..4))).collect();
        let (r, ratio) = orth_residual(&q, &u);
        let qtu = q.project(&u);
        let lhs = norm2(&u).powi(2);
        let rhs = norm2(&qtu).powi(2) + norm2(&r).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
        prop_assert!((ratio - norm2(&r) / norm2(&u)).abs() <= 1e-14);
    }

    #[test]
    fn gmres_convergence_flag_is_honest(seed in any::<u64>(), n in 2usize..60, rtol_exp in -12i32..-3, maxit in 1usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, rng.gen_range(1.0..4.0));
            for _ in 0..3 {
                b.push(i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0));
            }
        }
        let a = b.build();
        let rhs = random_vec(&mut rng, n);
        let rtol = 10f64.powi(rtol_exp);
        let out = gmres(&a, &rhs, None, &GmresOptions { rtol, max_iter: maxit });
        if let Ok(out) = out {
            let ax = a.mul_vec(&out.x);
            let res: Vec<f64> = rhs.iter().zip(&ax).map(|(x, y)| x - y).collect();
            let rel = norm2(&res) / norm2(&rhs);
            if out.converged {
                prop_assert!(rel <= rtol, "claimed convergence at {rel:e} > {rtol:e}");
            }
            prop_assert!((rel - out.relative_residual).abs() <= 1e-12 + 1e-6 * rel);
        }
    }

    #[test]
    fn relative_error_ignores_grid_weight(seed in any::<u64>(), n in 1usize..50, weight_exp in -9i32..0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exact: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let approx: Vec<f64> = exact.iter().map(|x| x + rng.gen_range(-0.1..0.1)).collect();
        let plain = component_norms(&approx, &exact, 2, 1.0).unwrap().relative_error().unwrap();
        let weighted = component_norms(&approx, &exact, 2, 10f64.powi(weight_exp)).unwrap().relative_error().unwrap();
        prop_assert!((plain - weighted).abs() <= 1e-14 * plain.max(1e-300));
    }
}

/// Stable random matrix: negative definite symmetric part plus a skew part.
fn random_stable(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let s: Vec<Vec<f64>> = (0..n).map(|_| random_vec(rng, n)).collect();
    let skew = rng.gen_range(0.0..2.0);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sst: f64 = (0..n).map(|k| s[i][k] * s[j][k]).sum();
                    let shift = if i == j { 0.2 } else { 0.0 };
                    let k = if i < j { skew } else if i > j { -skew } else { 0.0 };
                    -(sst + shift) + k
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn accepted_steps_meet_the_tolerance(seed in any::<u64>(), n in 3usize..40, eps_exp in -6.0f64..-0.5, dt in 0.01f64..5.0, n_basis in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = LinearSystem::homogeneous(CsrMatrix::from_dense(&random_stable(&mut rng, n)));
        let cfg = IntegratorConfig { dt, epsilon: 10f64.powf(eps_exp), n_basis, ..IntegratorConfig::default() };
        let mut u = random_vec(&mut rng, n);
        let mut basis = BasisState::new(&u, n_basis);
        for step in 0..8 {
            let out = imexrb_step_detailed(&sys, (step + 1) as f64 * dt, &u, &mut basis, &cfg).unwrap();
            if !out.record.exhausted {
                // Independent projection: subtract each column's component.
                let mut r = out.state.clone();
                for j in 0..out.basis.n_cols() {
                    let col = out.basis.column(j);
                    let c = dot(col, &out.state);
                    r.iter_mut().zip(col).for_each(|(x, q)| *x -= c * q);
                }
                prop_assert!(norm2(&r) <= cfg.epsilon * norm2(&out.state) * (1.0 + 1e-9) + 1e-300);
            }
            prop_assert!(out.basis.n_cols() <= n_basis + cfg.max_inner - 1);
            u = out.state;
        }
    }

    #[test]
    fn norm_decays_monotonically_below_c2(seed in any::<u64>(), n in 2usize..25, fraction in 0.01f64..0.99, big_step in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<Vec<f64>> = (0..n).map(|_| random_vec(&mut rng, n)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| -((0..n).map(|k| b[i][k] * b[j][k]).sum::<f64>() + if i == j { 0.1 } else { 0.0 })).collect())
            .collect();
        let bound = exact_stability_bound(&rows).unwrap();
        let cfg = IntegratorConfig {
            dt: if big_step { 10.0 } else { 1.0 },
            n_steps: 200,
            epsilon: fraction * bound.c2,
            n_basis: 3,
            ..IntegratorConfig::default()
        };
        let sys = LinearSystem::homogeneous(CsrMatrix::from_dense(&rows));
        let traj = integrate(&sys, &random_vec(&mut rng, n), Method::ImexRb, &cfg).unwrap();
        prop_assert_eq!(traj.exhausted_steps(), 0);
        for w in traj.states.windows(2) {
            prop_assert!(norm2(&w[1]) <= norm2(&w[0]) * (1.0 + 1e-12));
        }
    }
}
