//! Self-adaptive IMEX time integration for stiff semidiscrete PDEs.
//!
//! Each IMEX-RB step solves the implicit Euler problem only on a small
//! reduced basis built from recent solutions, then takes a full-order
//! explicit step and enriches the basis until the result lies close enough
//! to its span. The crate ships the integrators (forward Euler, backward
//! Euler and IMEX-RB), the sparse and dense kernels they need, three
//! finite-difference benchmarks with exact solutions, error metrics and a
//! sweep harness that writes CSV.
//!
//! ```no_run
//! use imexrb::harness::{build_problem, epsilon_bar, evaluate, ProblemId};
//! use imexrb::integrators::{IntegratorConfig, Method};
//!
//! let bench = build_problem(ProblemId::AdvDiff2d, 51)?;
//! let cfg = IntegratorConfig {
//!     epsilon: epsilon_bar(ProblemId::AdvDiff2d, 51)?,
//!     ..IntegratorConfig::for_interval(1.0, 64)
//! };
//! let eval = evaluate(&bench, Method::ImexRb, &cfg)?;
//! println!("error {:.3e}", eval.series.aggregate);
//! # Ok::<(), imexrb::harness::HarnessError>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod integrators;
pub mod linalg;
pub mod metrics;
pub mod problem;
