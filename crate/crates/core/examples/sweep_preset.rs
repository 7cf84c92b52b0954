//! Running a sweep from Rust: load a preset, shrink it, run it in parallel
//! and write the result CSV.
//!
//! cargo run --release --example sweep_preset [out.csv]

use imexrb::harness::{preset, run_experiment, write_results};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sweep_preset.csv".into());
    let mut spec = preset("desk-advdiff2d")?;
    spec.dts.truncate(4);
    spec.step_log = None;
    println!("{}", spec.to_json());

    let outcome = run_experiment(&spec)?;
    for (n, bar) in &outcome.epsilon_bars {
        println!("n = {n}: epsilon_bar = {bar:.4e}");
    }
    for row in &outcome.rows {
        println!(
            "{:<40} error {:.3e}  diverged {}",
            row.point.to_string(),
            row.aggregate_error,
            row.diverged_at.is_some()
        );
    }
    write_results(out.as_ref(), &outcome.rows)?;
    println!("wrote {} rows to {out}", outcome.rows.len());
    Ok(())
}
