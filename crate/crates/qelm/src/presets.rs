//! Named experiment sets, one per figure or table being regenerated.

use qelm_core::architectures::{ArchitectureKind, ArchitectureSpec, MeasurementBasis};
use qelm_core::bounds::{requirement_table, sym_dim, ResourceReport};
use qelm_core::dynamics::DynamicsProfile;
use qelm_core::learn::PinvCutoff;
use qelm_core::qcore::{ComplexMatrix, HermitianObservable, Pauli};
use qelm_core::targets::{Axis, TargetSpec};
use qelm_core::C64;

use crate::config::{observable_target, scaled_runs, DEFAULT_DESK_SCALE};
use crate::error::{CliError, CliResult};
use crate::runner::{Job, Probe};

use ArchitectureKind::{D, MI, S3L, SM};

/// Runs per configuration at full scale.
const FULL_RUNS: usize = 100;
/// Runs per configuration of the entanglement table at full scale.
const ENTANGLEMENT_RUNS: usize = 25;
/// Fixed dataset size of the entanglement table at full scale.
const ENTANGLEMENT_FIXED_N: usize = 10_000;
/// Smallest fixed dataset size of the entanglement table at desk scale.
const ENTANGLEMENT_DESK_N: usize = 2_000;

/// Preset-level knobs supplied by the command line or a config file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub samples: Option<usize>,
    pub desk_scale: Option<f64>,
    /// Enables configurations far beyond desk scale.
    pub big_compute: bool,
}

impl Overrides {
    fn scale(&self) -> f64 {
        self.desk_scale.unwrap_or(DEFAULT_DESK_SCALE)
    }

    fn runs(&self, base: usize) -> usize {
        self.runs.unwrap_or_else(|| scaled_runs(base, self.scale()))
    }

    /// Applies seed and sample overrides to jobs a preset built.
    pub fn apply(&self, jobs: &mut [Job]) {
        for job in jobs {
            job.master_seed = self.seed.unwrap_or(job.master_seed);
            if let Some(n) = self.samples {
                job.settings.n_samples = n;
            }
        }
    }
}

/// What a preset produces.
#[derive(Clone, Debug, PartialEq)]
pub enum Plan {
    Experiments(Vec<Job>),
    Bounds(Vec<ResourceReport>),
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn(&Overrides) -> CliResult<Plan>,
}

impl Preset {
    pub fn plan(&self, o: &Overrides) -> CliResult<Plan> {
        if let Some(s) = o.desk_scale {
            crate::config::check_desk_scale(s)?;
        }
        let mut plan = (self.build)(o)?;
        if let Plan::Experiments(jobs) = &mut plan {
            o.apply(jobs);
        }
        Ok(plan)
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig3-sm-linear",
        description: "SM (2x1, 2x2, 3x1 reservoir qubits) on <XX> of a 2-qubit input",
        build: fig3,
    },
    Preset {
        name: "fig4-purity",
        description: "purity of a 1-qubit input, all four architectures at 16 outcomes",
        build: fig4,
    },
    Preset {
        name: "fig5-polynomial",
        description:
            "D with 1-qubit reservoirs: Tr[O rho^k] and entries of rho^k, k = 2..5, n = 2..5",
        build: fig5,
    },
    Preset {
        name: "fig6-renyi",
        description: "D with 1-qubit reservoirs: Renyi entropies, n = 2..5, N = 500",
        build: fig6,
    },
    Preset {
        name: "table-entanglement",
        description: "D on a 2-qubit input: concurrence and negativity, variable and fixed N",
        build: table_entanglement,
    },
    Preset {
        name: "fig7-dynamics",
        description: "S3L 1+1: Bloch components across dynamical regimes and measurement bases",
        build: fig7,
    },
    Preset {
        name: "table-correlations",
        description: "S3L 1+1: <X> and input/reservoir correlations across the coupling sweep",
        build: table_correlations,
    },
    Preset {
        name: "fig8-s3l-bound",
        description: "S3L on <XX> of a 2-qubit input, 1..3 reservoir qubits",
        build: fig8,
    },
    Preset {
        name: "fig9-mi-bound",
        description: "MI (n = 2) on Tr[XX rho^2] of a 2-qubit input, 1..6 reservoir qubits",
        build: fig9,
    },
    Preset {
        name: "fig10-d-bound",
        description: "D (n = 2) on Tr[XX rho^2] of a 2-qubit input, 1..2 qubits per reservoir",
        build: fig10,
    },
    Preset {
        name: "fig2-scaling",
        description: "qubit requirements of every architecture for a 3-qubit input, n = 1..10",
        build: fig2,
    },
    Preset {
        name: "colormaps",
        description: "qubit requirements of every architecture for 1..10 input qubits, n = 1..10",
        build: colormaps,
    },
];

pub fn find(name: &str) -> CliResult<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        CliError::usage(format!(
            "unknown preset `{name}`; available: {}",
            names.join(", ")
        ))
    })
}

fn spec(kind: ArchitectureKind, n: usize, input: usize, reservoir: usize) -> ArchitectureSpec {
    ArchitectureSpec::new(kind, n, input, reservoir)
}

fn target(r: qelm_core::Result<TargetSpec>) -> CliResult<TargetSpec> {
    r.map_err(|e| CliError::usage(format!("invalid preset target: {e}")))
}

fn job(s: ArchitectureSpec, targets: Vec<TargetSpec>, n_samples: usize, runs: usize) -> Job {
    Job::new(s, targets, n_samples, runs)
}

fn fig3(o: &Overrides) -> CliResult<Plan> {
    let xx = target(TargetSpec::pauli("XX"))?;
    let runs = o.runs(FULL_RUNS);
    Ok(Plan::Experiments(
        [(2, 1), (2, 2), (3, 1)]
            .into_iter()
            .map(|(n, r)| job(spec(SM, n, 2, r), vec![xx.clone()], 200, runs))
            .collect(),
    ))
}

fn fig4(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    // Every configuration measures 16 outcomes.
    Ok(Plan::Experiments(
        [(S3L, 1, 3), (SM, 2, 2), (MI, 2, 3), (D, 2, 1)]
            .into_iter()
            .map(|(k, n, r)| job(spec(k, n, 1, r), vec![TargetSpec::purity()], 200, runs))
            .collect(),
    ))
}

/// `max(200, ⌈1.5·d_sn⌉)` samples for `n` copies of a qubit.
fn polynomial_samples(n: usize) -> CliResult<usize> {
    let d = sym_dim(2, n)
        .map_err(|e| CliError::usage(e.to_string()))?
        .to_string()
        .parse::<usize>()
        .map_err(|e| CliError::usage(e.to_string()))?;
    Ok(200.max((3 * d).div_ceil(2)))
}

/// `Re/Im (ρᵏ)_ij` for a qubit, as `Tr[O ρᵏ]` with the matching operator.
fn element_targets(k: usize) -> CliResult<Vec<TargetSpec>> {
    let op = |terms: &[(Pauli, f64)]| -> CliResult<HermitianObservable> {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| {
            terms
                .iter()
                .map(|(p, c)| p.matrix().row(i)[j] * *c)
                .sum::<C64>()
        });
        HermitianObservable::new(m).map_err(|e| CliError::usage(e.to_string()))
    };
    Ok(vec![
        observable_target(
            &format!("Re(rho^{k})_00"),
            op(&[(Pauli::I, 0.5), (Pauli::Z, 0.5)])?,
            k,
        )?,
        // (ρᵏ)₀₁ = Tr[|1⟩⟨0| ρᵏ] and |1⟩⟨0| = (X − iY)/2.
        observable_target(&format!("Re(rho^{k})_01"), op(&[(Pauli::X, 0.5)])?, k)?,
        observable_target(&format!("Im(rho^{k})_01"), op(&[(Pauli::Y, -0.5)])?, k)?,
    ])
}

fn fig5(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    let mut targets = Vec::new();
    for k in 2..=5 {
        for p in ["I", "X", "Y", "Z"] {
            targets.push(target(TargetSpec::pauli_polynomial(p, k))?);
        }
        targets.extend(element_targets(k)?);
    }
    (2..=5)
        .map(|n| {
            Ok(job(
                spec(D, n, 1, 1),
                targets.clone(),
                polynomial_samples(n)?,
                runs,
            ))
        })
        .collect::<CliResult<_>>()
        .map(Plan::Experiments)
}

fn fig6(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    let targets = (2..=10)
        .map(|a| target(TargetSpec::renyi(a as f64)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Plan::Experiments(
        (2..=5)
            .map(|n| job(spec(D, n, 1, 1), targets.clone(), 500, runs))
            .collect(),
    ))
}

/// Published NMSE (mean ± std) for concurrence and negativity, per `n`.
fn entanglement_reference(variable_n: bool, n: usize) -> Option<(&'static str, &'static str)> {
    match (variable_n, n) {
        (true, 2) => Some(("0.849±0.275", "0.574±0.208")),
        (true, 3) => Some(("0.370±0.046", "0.179±0.022")),
        (true, 4) => Some(("0.178±0.009", "0.122±0.007")),
        (false, 2) => Some(("0.254±0.009", "0.172±0.006")),
        (false, 3) => Some(("0.123±0.003", "0.060±0.002")),
        (false, 4) => Some(("0.097±0.004", "0.068±0.003")),
        _ => None,
    }
}

fn table_entanglement(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(ENTANGLEMENT_RUNS);
    let fixed_n =
        ENTANGLEMENT_DESK_N.max((ENTANGLEMENT_FIXED_N as f64 * o.scale()).floor() as usize);
    let ns: &[usize] = if o.big_compute { &[2, 3, 4] } else { &[2, 3] };
    let mut jobs = Vec::new();
    for (mode, variable) in [("variable_n", true), ("fixed_n", false)] {
        for &n in ns {
            // Variable mode grows the dataset with the number of outcome probabilities.
            let samples = if variable {
                match n {
                    2 => 255,
                    3 => 1530,
                    _ => 7268,
                }
            } else {
                fixed_n
            };
            let mut j = job(
                spec(D, n, 2, 2),
                vec![TargetSpec::concurrence(), TargetSpec::negativity()],
                samples,
                runs,
            )
            .variant(mode);
            if let Some((c, neg)) = entanglement_reference(variable, n) {
                j.annotations = vec![
                    format!("published_nmse={c}"),
                    format!("published_nmse={neg}"),
                ];
            }
            jobs.push(j);
        }
    }
    Ok(Plan::Experiments(jobs))
}

fn fig7(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    let targets = vec![
        TargetSpec::bloch(Axis::X),
        TargetSpec::bloch(Axis::Y),
        TargetSpec::bloch(Axis::Z),
    ];
    let mut jobs = Vec::new();
    for (regime, j_scale, field) in [("J=0", 0.0, 1.0), ("h=0", 1.0, 0.0), ("J,h!=0", 1.0, 1.0)] {
        for basis in [MeasurementBasis::Computational, MeasurementBasis::X] {
            let dynamics = DynamicsProfile {
                j_scale,
                field,
                ..DynamicsProfile::ergodic()
            };
            let s = spec(S3L, 1, 1, 1).with_dynamics(dynamics).with_basis(basis);
            let b = match basis {
                MeasurementBasis::Computational => "computational",
                MeasurementBasis::X => "x",
            };
            jobs.push(job(s, targets.clone(), 200, runs).variant(format!("{regime};basis={b}")));
        }
    }
    Ok(Plan::Experiments(jobs))
}

/// Coupling scales whose mean `|J|` matches the published sweep (`E|J| = j_scale/2`).
pub const CORRELATION_J_SCALES: [f64; 5] = [0.0, 5.2e-8, 4.78e-6, 5.18e-4, 4.8e-2];

fn table_correlations(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    let x = target(TargetSpec::pauli("X"))?;
    Ok(Plan::Experiments(
        CORRELATION_J_SCALES
            .iter()
            .map(|&j_scale| {
                let dynamics = DynamicsProfile {
                    j_scale,
                    ..DynamicsProfile::ergodic()
                };
                let mut j = job(
                    spec(S3L, 1, 1, 1).with_dynamics(dynamics),
                    vec![x.clone()],
                    200,
                    runs,
                )
                .variant(format!(
                    "j_scale={j_scale:e};mean_abs_J={:e}",
                    j_scale / 2.0
                ));
                j.probe = Probe::Correlations;
                // The ⟨X⟩ signal scales with |J|, far below the default cutoff.
                j.settings.cutoff = PinvCutoff::Machine;
                j
            })
            .collect(),
    ))
}

fn fig8(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    let xx = target(TargetSpec::pauli("XX"))?;
    Ok(Plan::Experiments(
        (1..=3)
            .map(|r| job(spec(S3L, 1, 2, r), vec![xx.clone()], 200, runs))
            .collect(),
    ))
}

/// At least `1.5·d_sn` samples for a quadratic target of a 2-qubit input.
const QUADRATIC_SAMPLES: usize = 250;

fn fig9(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    let t = target(TargetSpec::pauli_polynomial("XX", 2))?;
    Ok(Plan::Experiments(
        (1..=6)
            .map(|r| job(spec(MI, 2, 2, r), vec![t.clone()], QUADRATIC_SAMPLES, runs))
            .collect(),
    ))
}

fn fig10(o: &Overrides) -> CliResult<Plan> {
    let runs = o.runs(FULL_RUNS);
    let t = target(TargetSpec::pauli_polynomial("XX", 2))?;
    Ok(Plan::Experiments(
        (1..=2)
            .map(|r| job(spec(D, 2, 2, r), vec![t.clone()], QUADRATIC_SAMPLES, runs))
            .collect(),
    ))
}

fn bounds_grid(inputs: core::ops::RangeInclusive<usize>) -> CliResult<Plan> {
    let mut rows = Vec::new();
    for kind in ArchitectureKind::ALL {
        rows.extend(
            requirement_table(kind, inputs.clone(), 1..=10)
                .map_err(|e| CliError::from_core("bounds grid", e))?,
        );
    }
    Ok(Plan::Bounds(rows))
}

fn fig2(_: &Overrides) -> CliResult<Plan> {
    bounds_grid(3..=3)
}

fn colormaps(_: &Overrides) -> CliResult<Plan> {
    bounds_grid(1..=10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_plans_and_validates() {
        for p in PRESETS {
            match p.plan(&Overrides::default()).unwrap() {
                Plan::Experiments(jobs) => {
                    assert!(!jobs.is_empty(), "{}", p.name);
                    for j in &jobs {
                        j.validate().unwrap();
                        let base = if p.name == "table-entanglement" {
                            ENTANGLEMENT_RUNS
                        } else {
                            FULL_RUNS
                        };
                        assert_eq!(j.n_runs, base / 10, "{} {}", p.name, j.describe());
                    }
                }
                Plan::Bounds(rows) => assert!(!rows.is_empty()),
            }
        }
    }

    #[test]
    fn names_are_unique() {
        for (i, a) in PRESETS.iter().enumerate() {
            assert!(PRESETS[i + 1..].iter().all(|b| b.name != a.name));
        }
        assert!(find("nope").is_err());
    }

    #[test]
    fn desk_scale_floors_runs() {
        let o = Overrides {
            desk_scale: Some(0.05),
            ..Overrides::default()
        };
        let Plan::Experiments(jobs) = find("table-entanglement").unwrap().plan(&o).unwrap() else {
            panic!("expected experiments")
        };
        assert!(jobs.iter().all(|j| j.n_runs == 1));
        assert!(jobs.iter().all(|j| j.spec.n <= 3));
        let bad = Overrides {
            desk_scale: Some(1.5),
            ..Overrides::default()
        };
        assert!(find("fig3-sm-linear").unwrap().plan(&bad).is_err());
    }

    #[test]
    fn element_targets_are_consistent_with_pauli_moments() {
        let rho = qelm_core::qcore::DensityMatrix::from_bloch([0.3, -0.4, 0.5]).unwrap();
        let t = element_targets(3).unwrap();
        let cube = qelm_core::qcore::matrix_power(&rho, 3).unwrap();
        let e = |i: usize, j: usize| cube.row(i)[j];
        assert!((t[0].evaluate(&rho).unwrap() - e(0, 0).re).abs() < 1e-14);
        assert!((t[1].evaluate(&rho).unwrap() - e(0, 1).re).abs() < 1e-14);
        assert!((t[2].evaluate(&rho).unwrap() - e(0, 1).im).abs() < 1e-14);
    }

    #[test]
    fn entanglement_table_is_gated() {
        let o = Overrides {
            big_compute: true,
            ..Overrides::default()
        };
        let Plan::Experiments(jobs) = find("table-entanglement").unwrap().plan(&o).unwrap() else {
            panic!("expected experiments")
        };
        assert_eq!(jobs.iter().filter(|j| j.spec.n == 4).count(), 2);
        assert_eq!(jobs[0].annotations[0], "published_nmse=0.849±0.275");
    }
}
