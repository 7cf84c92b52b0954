//! Kernels checked against dense nalgebra factorizations.

use imexrb::harness::{build_problem, ProblemId};
use imexrb::linalg::{cond2_estimate, gmres, ilu_factor, CsrMatrix, GmresOptions, QrFactor, TripletBuilder};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_dense(a: &CsrMatrix) -> DMatrix<f64> {
    let rows = a.to_dense();
    DMatrix::from_fn(a.n_rows(), a.n_cols(), |i, j| rows[i][j])
}

/// Largest principal angle between two subspaces with orthonormal bases of
/// equal dimension: `||(I - P P^T) Q||_2 = sin(theta_max)`.
fn max_principal_angle(p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let residual = q - p * (p.transpose() * q);
    residual.singular_values().max().asin()
}

#[test]
fn sequential_appends_span_the_snapshot_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(87);
    let (m, k) = (40, 10);
    let snapshots: Vec<Vec<f64>> = (0..k).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut qr = QrFactor::init(&snapshots[0]);
    for s in &snapshots[1..] {
        assert!(qr.append(s, 1e-8));
    }
    let q = DMatrix::from_fn(m, k, |i, j| qr.q().column(j)[i]);
    let oracle = DMatrix::from_fn(m, k, |i, j| snapshots[j][i]).qr().q();
    assert!((q.transpose() * &q - DMatrix::identity(k, k)).norm() <= 1e-10 * k as f64);
    let angle = max_principal_angle(&oracle, &q);
    assert!(angle < 1e-8, "principal angle {angle:e}");
}

#[test]
fn window_after_removals_spans_remaining_snapshots() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let (m, k, keep) = (30, 12, 5);
    let snapshots: Vec<Vec<f64>> = (0..k).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut qr = QrFactor::init(&snapshots[0]);
    for s in &snapshots[1..] {
        qr.append(s, 1e-8);
        if qr.n_cols() > keep {
            qr.remove_oldest();
        }
    }
    let q = DMatrix::from_fn(m, keep, |i, j| qr.q().column(j)[i]);
    let oracle = DMatrix::from_fn(m, keep, |i, j| snapshots[k - keep + j][i]).qr().q();
    assert!(max_principal_angle(&oracle, &q) < 1e-8);
}

fn random_sparse(rng: &mut ChaCha8Rng, n: usize, density: f64, diag: f64) -> CsrMatrix {
    let mut b = TripletBuilder::new(n, n);
    for i in 0..n {
        b.push(i, i, diag * rng.gen_range(0.5..2.0));
        for j in 0..n {
            if i != j && rng.gen_bool(density) {
                b.push(i, j, rng.gen_range(-1.0..1.0));
            }
        }
    }
    b.build()
}

fn assert_cond_close(a: &CsrMatrix, label: &str) {
    let s = to_dense(a).singular_values();
    let exact = s.max() / s.min();
    let est = cond2_estimate(a, 1e-2).unwrap();
    let rel = (est / exact - 1.0).abs();
    assert!(rel <= 0.15, "{label}: estimate {est:.4e}, dense SVD {exact:.4e}");
}

#[test]
fn condition_estimate_matches_dense_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(130);
    for (n, density, diag) in [(50, 0.1, 3.0), (120, 0.05, 2.0), (200, 0.02, 1.5)] {
        let a = random_sparse(&mut rng, n, density, diag);
        assert_cond_close(&a, &format!("random n={n}"));
    }
    for (problem, n) in [(ProblemId::AdvDiff2d, 15), (ProblemId::AdvDiff3d, 7)] {
        let bench = build_problem(problem, n).unwrap();
        assert_cond_close(bench.system.linear_operator().unwrap(), &format!("{problem} n={n}"));
    }
}

#[test]
fn gmres_solution_matches_dense_lu() {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let a = random_sparse(&mut rng, 80, 0.1, 4.0);
    let b: Vec<f64> = (0..80).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let out = gmres(&a, &b, None, &GmresOptions::default()).unwrap();
    assert!(out.converged);
    let exact = to_dense(&a).lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
    let err = (nalgebra::DVector::from_vec(out.x) - &exact).norm() / exact.norm();
    assert!(err < 1e-8, "{err:e}");
}

#[test]
fn ilu_cuts_gmres_iterations_on_benchmark_step_matrices() {
    for (problem, n, dt) in [
        (ProblemId::AdvDiff2d, 101, 1.0 / 32.0),
        (ProblemId::AdvDiff2d, 51, 2f64.powi(-9)),
        (ProblemId::AdvDiff3d, 21, 1.0 / 16.0),
    ] {
        let bench = build_problem(problem, n).unwrap();
        let m = bench.system.linear_operator().unwrap().shifted(1.0, -dt);
        let b = bench.initial_condition();
        let opts = GmresOptions::default();
        let plain = gmres(&m, &b, None, &opts).unwrap();
        let ilu = ilu_factor(&m, 5e-3).unwrap();
        let pre = gmres(&m, &b, Some(&ilu), &opts).unwrap();
        assert!(plain.converged && pre.converged);
        assert!(
            pre.iterations < plain.iterations,
            "{problem} n={n}: {} preconditioned vs {} plain",
            pre.iterations,
            plain.iterations
        );
    }
}
