//! CSV output. Reals use scientific notation with 17 significant digits,
//! so values round-trip exactly. Fields that do not apply to a method
//! (tolerance and window size for FE and BE) are left empty.

use std::path::Path;

use super::run::{ResultRow, StepLogRow};
use super::{HarnessError, Result};

pub const RESULT_COLUMNS: [&str; 25] = [
    "problem",
    "method",
    "n_per_dim",
    "h",
    "dt",
    "n_steps",
    "epsilon",
    "n_basis",
    "max_inner",
    "aggregate_error",
    "final_error",
    "mean_inner_iterations",
    "max_inner_iterations",
    "exhausted_steps",
    "wall_time_s",
    "diverged",
    "diverged_at_step",
    "jacobian_assemblies",
    "f_evals",
    "jacobian_matvecs",
    "newton_iterations",
    "gmres_iterations",
    "max_reduced_dim",
    "seed",
    "repeats",
];

pub const STEP_LOG_COLUMNS: [&str; 13] = [
    "problem",
    "method",
    "n_per_dim",
    "dt",
    "epsilon",
    "n_basis",
    "step",
    "time",
    "relative_error",
    "inner_iterations",
    "residual_ratio",
    "exhausted",
    "window_size",
];

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn result_record(r: &ResultRow) -> Vec<String> {
    let p = &r.point;
    let c = &r.counters;
    vec![
        r.problem.clone(),
        p.method.to_string(),
        p.n_per_dim.to_string(),
        real(r.h),
        real(p.dt),
        r.n_steps.to_string(),
        p.epsilon.map(real).unwrap_or_default(),
        opt(p.n_basis),
        opt(r.max_inner),
        real(r.aggregate_error),
        real(r.final_error),
        real(r.mean_inner_iterations),
        r.max_inner_iterations.to_string(),
        r.exhausted_steps.to_string(),
        real(r.wall_time.as_secs_f64()),
        r.diverged_at.is_some().to_string(),
        opt(r.diverged_at),
        c.jacobian_assemblies.to_string(),
        c.f_evals.to_string(),
        c.jacobian_matvecs.to_string(),
        c.newton_iterations.to_string(),
        c.gmres_iterations.to_string(),
        c.max_reduced_dim.to_string(),
        r.seed.to_string(),
        r.repeats.to_string(),
    ]
}

fn step_record(s: &StepLogRow) -> Vec<String> {
    let p = &s.point;
    vec![
        s.problem.clone(),
        p.method.to_string(),
        p.n_per_dim.to_string(),
        real(p.dt),
        p.epsilon.map(real).unwrap_or_default(),
        opt(p.n_basis),
        s.step.to_string(),
        real(s.time),
        real(s.relative_error),
        s.inner_iterations.to_string(),
        real(s.residual_ratio),
        s.exhausted.to_string(),
        s.window_size.to_string(),
    ]
}

/// Writes through a temporary sibling file and renames it into place, so
/// readers never see a partial file.
fn write_atomic(path: &Path, header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    let tmp = path.with_extension("csv.partial");
    {
        let mut w = csv::Writer::from_path(&tmp)?;
        w.write_record(header)?;
        for rec in records {
            w.write_record(&rec)?;
        }
        w.flush().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_atomic(path, &RESULT_COLUMNS, rows.iter().map(result_record))
}

pub fn write_step_log(path: &Path, rows: &[StepLogRow]) -> Result<()> {
    write_atomic(path, &STEP_LOG_COLUMNS, rows.iter().map(step_record))
}
