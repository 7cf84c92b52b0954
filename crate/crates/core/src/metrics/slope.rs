use super::{MetricsError, Result};

/// Least-squares slope of `log(error)` against `log(dt)`.
pub fn fit_slope(dts: &[f64], errors: &[f64]) -> Result<f64> {
    if dts.len() != errors.len() {
        return Err(MetricsError::ShapeMismatch {
            expected: dts.len(),
            found: errors.len(),
        });
    }
    if dts.len() < 2 {
        return Err(MetricsError::Degenerate("need at least two points".into()));
    }
    if dts.iter().chain(errors).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(MetricsError::Degenerate("values must be positive and finite".into()));
    }
    let x: Vec<f64> = dts.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(MetricsError::Degenerate("all step sizes are equal".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dts() -> Vec<f64> {
        (4..=10).map(|i| 2f64.powi(-i)).collect()
    }

    #[test]
    fn exact_power_laws() {
        let d = dts();
        let first: Vec<f64> = d.iter().map(|t| 3.0 * t).collect();
        let second: Vec<f64> = d.iter().map(|t| 0.5 * t * t).collect();
        assert!((fit_slope(&d, &first).unwrap() - 1.0).abs() < 1e-10);
        assert!((fit_slope(&d, &second).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_first_order_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = dts();
        for _ in 0..50 {
            let e: Vec<f64> = d.iter().map(|t| 0.2 * t * (1.0 + rng.gen_range(-0.1..0.1))).collect();
            let s = fit_slope(&d, &e).unwrap();
            assert!((0.85..=1.15).contains(&s), "{s}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_slope(&[0.1], &[1.0]).is_err());
        assert!(fit_slope(&[0.1, 0.1, 0.1], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_slope(&[0.1, 0.2], &[0.0, 1.0]).is_err());
        assert!(fit_slope(&[0.1, 0.2], &[1.0]).is_err());
    }
}
