//! Named sweeps. `fig-*` presets use the full-scale grids of the reference
//! experiments; `desk-*` presets are coarser variants that finish in
//! minutes on a workstation.

use std::path::PathBuf;

use super::spec::{EpsilonSpec, ExperimentSpec, SolverOptions};
use super::{HarnessError, ProblemId, Result, BURGERS_NU};
use crate::integrators::Method;

pub const PRESET_NAMES: [&str; 11] = [
    "fig-advdiff2d-eps",
    "fig-advdiff2d-N",
    "fig-burgers-stability",
    "fig-burgers-convergence",
    "fig-burgers-cputimes",
    "fig-advdiff3d-eps",
    "fig-advdiff3d-N",
    "desk-advdiff2d",
    "desk-advdiff2d-N",
    "desk-burgers-stability",
    "desk-advdiff3d",
];

/// `2^-lo, ..., 2^-hi`.
fn powers_of_two(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|i| 2f64.powi(-i)).collect()
}

fn gammas(values: &[f64]) -> Vec<EpsilonSpec> {
    values.iter().map(|&gamma| EpsilonSpec::Relative { gamma }).collect()
}

fn absolute(values: &[f64]) -> Vec<EpsilonSpec> {
    values.iter().map(|&e| EpsilonSpec::Absolute(e)).collect()
}

/// Multiples of `K_2(A)^{-1}` swept in the tolerance studies.
const GAMMA_SWEEP: [f64; 5] = [1.0, 3.0, 10.0, 30.0, 100.0];
/// Window sizes swept in the basis-size studies.
const N_SWEEP: [usize; 4] = [1, 5, 10, 15];
const BURGERS_EPS: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    use Method::{BackwardEuler as BE, ForwardEuler as FE, ImexRb as RB};
    let base = |problem, n_per_dim: Vec<usize>, methods: Vec<Method>, dts: Vec<f64>| ExperimentSpec {
        name: name.to_string(),
        problem,
        n_per_dim,
        methods,
        dts,
        final_time: 1.0,
        epsilons: gammas(&[1.0]),
        n_basis: vec![10],
        max_inner: 100,
        nu: BURGERS_NU,
        seed: 0,
        repeats: 1,
        solver: SolverOptions::default(),
        output: Some(PathBuf::from(format!("{name}.csv"))),
        step_log: None,
    };
    let with_steps = |mut s: ExperimentSpec| {
        s.step_log = Some(PathBuf::from(format!("{name}-steps.csv")));
        s
    };
    let spec = match name {
        "fig-advdiff2d-eps" => ExperimentSpec {
            epsilons: gammas(&GAMMA_SWEEP),
            repeats: 10,
            ..with_steps(base(ProblemId::AdvDiff2d, vec![101, 201], vec![BE, RB], powers_of_two(4, 10)))
        },
        "fig-advdiff2d-N" => ExperimentSpec {
            n_basis: N_SWEEP.to_vec(),
            repeats: 10,
            ..with_steps(base(ProblemId::AdvDiff2d, vec![101, 201], vec![BE, RB], powers_of_two(4, 10)))
        },
        "fig-burgers-stability" => ExperimentSpec {
            epsilons: absolute(&BURGERS_EPS),
            ..with_steps(base(ProblemId::Burgers2d, vec![101], vec![FE, BE, RB], vec![1.0 / 40.0]))
        },
        "fig-burgers-convergence" => ExperimentSpec {
            epsilons: absolute(&BURGERS_EPS),
            ..base(ProblemId::Burgers2d, vec![101], vec![BE, RB], powers_of_two(4, 10))
        },
        "fig-burgers-cputimes" => ExperimentSpec {
            epsilons: absolute(&[1e-4]),
            n_basis: vec![5, 10, 25],
            repeats: 5,
            ..base(
                ProblemId::Burgers2d,
                (5..=9).map(|i| 1usize << i).collect(),
                vec![BE, RB],
                vec![1.0 / 40.0],
            )
        },
        "fig-advdiff3d-eps" => ExperimentSpec {
            epsilons: gammas(&GAMMA_SWEEP),
            ..with_steps(base(ProblemId::AdvDiff3d, vec![51, 81], vec![BE, RB], powers_of_two(4, 10)))
        },
        "fig-advdiff3d-N" => ExperimentSpec {
            n_basis: N_SWEEP.to_vec(),
            ..with_steps(base(ProblemId::AdvDiff3d, vec![51, 81], vec![BE, RB], powers_of_two(4, 10)))
        },
        "desk-advdiff2d" => ExperimentSpec {
            epsilons: gammas(&[1.0, 10.0, 100.0]),
            ..with_steps(base(ProblemId::AdvDiff2d, vec![51], vec![FE, BE, RB], powers_of_two(4, 9)))
        },
        "desk-advdiff2d-N" => ExperimentSpec {
            n_basis: N_SWEEP.to_vec(),
            ..base(ProblemId::AdvDiff2d, vec![51], vec![BE, RB], powers_of_two(4, 9))
        },
        "desk-burgers-stability" => ExperimentSpec {
            epsilons: absolute(&BURGERS_EPS),
            ..with_steps(base(ProblemId::Burgers2d, vec![51], vec![FE, BE, RB], vec![1.0 / 40.0]))
        },
        "desk-advdiff3d" => ExperimentSpec {
            epsilons: gammas(&[1.0, 10.0]),
            ..base(ProblemId::AdvDiff3d, vec![21], vec![BE, RB], powers_of_two(4, 8))
        },
        _ => {
            return Err(HarnessError::UnknownPreset {
                name: name.to_string(),
                available: PRESET_NAMES.join(", "),
            })
        }
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_is_valid() {
        for name in PRESET_NAMES {
            let spec = preset(name).unwrap();
            assert_eq!(spec.name, name);
        }
        assert!(matches!(preset("fig-heat"), Err(HarnessError::UnknownPreset { .. })));
    }

    #[test]
    fn advdiff2d_tolerance_sweep() {
        let s = preset("fig-advdiff2d-eps").unwrap();
        assert_eq!(s.dts.first(), Some(&0.0625));
        assert_eq!(s.dts.last(), Some(&(1.0 / 1024.0)));
        assert_eq!(s.n_per_dim, vec![101, 201]);
        assert_eq!((s.n_basis.as_slice(), s.max_inner), (&[10][..], 100));
    }

    #[test]
    fn burgers_stability_sweep() {
        let s = preset("fig-burgers-stability").unwrap();
        assert_eq!(s.n_per_dim, vec![101]);
        assert_eq!(s.n_steps(s.dts[0]).unwrap(), 40);
        assert_eq!(s.epsilons, absolute(&[1e-2, 1e-3, 1e-4, 1e-5]));
    }

    #[test]
    fn desk_variant_is_coarse() {
        let s = preset("desk-advdiff2d").unwrap();
        assert_eq!(s.n_per_dim, vec![51]);
        assert_eq!(s.dts.len(), 6);
    }
}
