//! The four readout architectures and their feature maps.
//!
//! Features are exact computational-basis outcome probabilities. Within a
//! unit the input qubits come first, then the reservoir; units are laid out
//! left to right.

mod povm;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use faer::Mat;

use crate::dynamics::{
    build_entangling_map, channel_from_ising, DynamicsProfile, IsingParams, UnitaryChannel,
};
use crate::qcore::{
    check_dim, partial_trace_matrix, qubit_dim, ComplexMatrix, DensityMatrix, Ensemble,
    RandomSource,
};
use crate::{Error, Result, C64};

pub use povm::{design_matrix_rank, effective_povm, RANK_CUTOFF};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArchitectureKind {
    /// Single three-layer: one input, one reservoir.
    S3L,
    /// Spatially multiplexed: independent units in parallel.
    SM,
    /// Multiple injections into one reservoir.
    MI,
    /// Distributed: parallel units entangled by a global map.
    D,
}

impl ArchitectureKind {
    pub const ALL: [ArchitectureKind; 4] = [Self::S3L, Self::SM, Self::MI, Self::D];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::S3L => "S3L",
            Self::SM => "SM",
            Self::MI => "MI",
            Self::D => "D",
        }
    }

    /// True when features are linear in the input state.
    pub fn is_linear(self) -> bool {
        matches!(self, Self::S3L | Self::SM)
    }
}

impl fmt::Display for ArchitectureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArchitectureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::contract(format!("unknown architecture '{s}'")))
    }
}

/// Basis of the final projective measurement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MeasurementBasis {
    #[default]
    Computational,
    /// Eigenbasis of σx on every measured qubit.
    X,
}

impl FromStr for MeasurementBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "computational" | "z" => Ok(Self::Computational),
            "x" => Ok(Self::X),
            _ => Err(Error::contract(format!("unknown measurement basis '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArchitectureSpec {
    pub kind: ArchitectureKind,
    /// Units for SM and D, injections for MI, 1 for S3L.
    pub n: usize,
    pub input_qubits: usize,
    /// Qubits in each reservoir.
    pub reservoir_qubits: usize,
    pub dynamics: DynamicsProfile,
    pub basis: MeasurementBasis,
    pub reservoir_ensemble: Ensemble,
}

impl ArchitectureSpec {
    pub fn new(
        kind: ArchitectureKind,
        n: usize,
        input_qubits: usize,
        reservoir_qubits: usize,
    ) -> Self {
        Self {
            kind,
            n,
            input_qubits,
            reservoir_qubits,
            dynamics: DynamicsProfile::ergodic(),
            basis: MeasurementBasis::Computational,
            reservoir_ensemble: Ensemble::Ginibre,
        }
    }

    pub fn with_dynamics(mut self, dynamics: DynamicsProfile) -> Self {
        self.dynamics = dynamics;
        self
    }

    pub fn with_basis(mut self, basis: MeasurementBasis) -> Self {
        self.basis = basis;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::contract("n must be at least 1"));
        }
        if self.kind == ArchitectureKind::S3L && self.n != 1 {
            return Err(Error::contract("S3L has exactly one unit"));
        }
        if self.input_qubits == 0 || self.reservoir_qubits == 0 {
            return Err(Error::contract(
                "input and reservoir need at least one qubit each",
            ));
        }
        self.dynamics.validate()?;
        check_dim(self.total_dim_u128())?;
        Ok(())
    }

    pub fn unit_qubits(&self) -> usize {
        self.input_qubits + self.reservoir_qubits
    }

    /// Number of unit systems that exist side by side.
    pub fn units(&self) -> usize {
        match self.kind {
            ArchitectureKind::SM | ArchitectureKind::D => self.n,
            ArchitectureKind::S3L | ArchitectureKind::MI => 1,
        }
    }

    /// Qubits in the largest system simulated at once.
    pub fn simulated_qubits(&self) -> usize {
        match self.kind {
            ArchitectureKind::D => self.n * self.unit_qubits(),
            _ => self.unit_qubits(),
        }
    }

    fn total_dim_u128(&self) -> u128 {
        let q = self.simulated_qubits();
        if q >= 127 {
            u128::MAX
        } else {
            1u128 << q
        }
    }

    /// Number of outcome probabilities fed to the readout.
    pub fn feature_len(&self) -> usize {
        let unit = 1usize << self.unit_qubits();
        match self.kind {
            ArchitectureKind::S3L | ArchitectureKind::MI => unit,
            ArchitectureKind::SM => self.n * unit,
            ArchitectureKind::D => 1usize << self.simulated_qubits(),
        }
    }

    /// Copies of the input the features depend on.
    pub fn input_copies(&self) -> usize {
        match self.kind {
            ArchitectureKind::S3L | ArchitectureKind::SM => 1,
            ArchitectureKind::MI | ArchitectureKind::D => self.n,
        }
    }
}

/// Outcome probabilities, split into `blocks` normalized blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub blocks: usize,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(block, basis index)` of entry `i`.
    pub fn label(&self, i: usize) -> (usize, usize) {
        let per = self.values.len() / self.blocks.max(1);
        (i / per, i % per)
    }

    pub fn block(&self, b: usize) -> &[f64] {
        let per = self.values.len() / self.blocks.max(1);
        &self.values[b * per..(b + 1) * per]
    }
}

/// An architecture with every random ingredient fixed.
#[derive(Clone, Debug)]
pub struct PreparedArchitecture {
    spec: ArchitectureSpec,
    unit_channels: Vec<UnitaryChannel>,
    entangler: Option<UnitaryChannel>,
    reservoir_states: Vec<DensityMatrix>,
    /// Measurement-basis rotation times the full pre-measurement unitary,
    /// one per measured system.
    readouts: Vec<ComplexMatrix>,
    /// Real linear map from the vectorized `ρ^{⊗copies}` to the features.
    feature_operator: Option<Mat<f64>>,
}

/// Draws reservoir states, unit maps and (for D) the entangler.
pub fn prepare(spec: &ArchitectureSpec, rng: &mut RandomSource) -> Result<PreparedArchitecture> {
    spec.validate()?;
    let res_dim = qubit_dim(spec.reservoir_qubits)?;
    let draws = match spec.kind {
        ArchitectureKind::SM | ArchitectureKind::D => spec.n,
        ArchitectureKind::S3L | ArchitectureKind::MI => 1,
    };
    let mut reservoir_states = Vec::with_capacity(draws);
    let mut unit_channels = Vec::with_capacity(draws);
    for _ in 0..draws {
        reservoir_states.push(spec.reservoir_ensemble.sample(res_dim, rng)?);
        let params = IsingParams::sample(spec.unit_qubits(), &spec.dynamics, rng)?;
        unit_channels.push(channel_from_ising(&params)?);
    }
    let entangler = if spec.kind == ArchitectureKind::D && spec.n > 1 {
        let units: Vec<usize> = (0..spec.n).map(|_| spec.unit_qubits()).collect();
        Some(build_entangling_map(&units, &spec.dynamics, rng)?)
    } else {
        None
    };
    PreparedArchitecture::from_parts(*spec, unit_channels, entangler, reservoir_states)
}

impl PreparedArchitecture {
    /// Assembles an architecture from explicit ingredients, e.g. identical or
    /// identity channels in tests.
    pub fn from_parts(
        spec: ArchitectureSpec,
        unit_channels: Vec<UnitaryChannel>,
        entangler: Option<UnitaryChannel>,
        reservoir_states: Vec<DensityMatrix>,
    ) -> Result<Self> {
        spec.validate()?;
        let expected = match spec.kind {
            ArchitectureKind::SM | ArchitectureKind::D => spec.n,
            ArchitectureKind::S3L | ArchitectureKind::MI => 1,
        };
        if unit_channels.len() != expected || reservoir_states.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "architecture ingredients",
                expected,
                found: unit_channels.len().min(reservoir_states.len()),
            });
        }
        let unit_dim = 1usize << spec.unit_qubits();
        let res_dim = 1usize << spec.reservoir_qubits;
        for c in &unit_channels {
            if c.dim() != unit_dim {
                return Err(Error::DimensionMismatch {
                    context: "unit channel",
                    expected: unit_dim,
                    found: c.dim(),
                });
            }
        }
        for eta in &reservoir_states {
            if eta.dim() != res_dim {
                return Err(Error::DimensionMismatch {
                    context: "reservoir state",
                    expected: res_dim,
                    found: eta.dim(),
                });
            }
        }
        let total_dim = 1usize << spec.simulated_qubits();
        match (&entangler, spec.kind == ArchitectureKind::D && spec.n > 1) {
            (Some(phi), true) if phi.dim() != total_dim => {
                return Err(Error::DimensionMismatch {
                    context: "entangler",
                    expected: total_dim,
                    found: phi.dim(),
                })
            }
            (Some(_), false) => {
                return Err(Error::contract("only D with n ≥ 2 carries an entangler"))
            }
            (None, true) => return Err(Error::contract("D with n ≥ 2 needs an entangler")),
            _ => {}
        }

        let readouts = match spec.kind {
            ArchitectureKind::D => {
                let units: Vec<ComplexMatrix> =
                    unit_channels.iter().map(|c| c.unitary().clone()).collect();
                let total = match &entangler {
                    Some(phi) => phi.unitary().mul_kron_right(&units)?,
                    None => units[0].clone(),
                };
                alloc::vec![rotate_to_basis(total, spec.basis, spec.simulated_qubits())?]
            }
            _ => unit_channels
                .iter()
                .map(|c| rotate_to_basis(c.unitary().clone(), spec.basis, spec.unit_qubits()))
                .collect::<Result<_>>()?,
        };

        let mut arch = Self {
            spec,
            unit_channels,
            entangler,
            reservoir_states,
            readouts,
            feature_operator: None,
        };
        arch.feature_operator = povm::feature_operator(&arch)?;
        Ok(arch)
    }

    pub fn spec(&self) -> &ArchitectureSpec {
        &self.spec
    }

    pub fn unit_channels(&self) -> &[UnitaryChannel] {
        &self.unit_channels
    }

    pub fn entangler(&self) -> Option<&UnitaryChannel> {
        self.entangler.as_ref()
    }

    pub fn reservoir_states(&self) -> &[DensityMatrix] {
        &self.reservoir_states
    }

    fn input_dim(&self) -> usize {
        1 << self.spec.input_qubits
    }

    fn check_input(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "input state",
                expected: self.input_dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// Features of `rho` under the architecture's own kind.
    pub fn features(&self, rho: &DensityMatrix) -> Result<FeatureVector> {
        match self.spec.kind {
            ArchitectureKind::S3L => features_s3l(self, rho),
            ArchitectureKind::SM => features_sm(self, rho),
            ArchitectureKind::MI => features_mi(self, rho),
            ArchitectureKind::D => features_d(self, rho),
        }
    }
}

/// `B·U` with `B = H^{⊗q}` for the x basis.
fn rotate_to_basis(
    u: ComplexMatrix,
    basis: MeasurementBasis,
    qubits: usize,
) -> Result<ComplexMatrix> {
    match basis {
        MeasurementBasis::Computational => Ok(u),
        MeasurementBasis::X => {
            let s = 1.0 / libm::sqrt(2.0);
            let h = ComplexMatrix::from_fn(2, 2, |i, j| {
                C64::new(if i == 1 && j == 1 { -s } else { s }, 0.0)
            });
            let factors: Vec<ComplexMatrix> = (0..qubits).map(|_| h.clone()).collect();
            ComplexMatrix::mul_kron_left(&factors, &u)
        }
    }
}

/// `diag(R (⊗ factors) R†)`.
fn measured_diagonal(readout: &ComplexMatrix, factors: &[ComplexMatrix]) -> Result<Vec<f64>> {
    let m = readout.mul_kron_right(factors)?;
    Ok((0..readout.rows())
        .map(|k| {
            m.row(k)
                .iter()
                .zip(readout.row(k))
                .map(|(a, b)| (a * b.conj()).re)
                .sum()
        })
        .collect())
}

fn unit_diagonal(
    arch: &PreparedArchitecture,
    unit: usize,
    rho: &DensityMatrix,
) -> Result<Vec<f64>> {
    measured_diagonal(
        &arch.readouts[unit],
        &[
            rho.matrix().clone(),
            arch.reservoir_states[unit].matrix().clone(),
        ],
    )
}

/// Outcome probabilities of `U(ρ⊗η)U†` for the single unit.
pub fn features_s3l(arch: &PreparedArchitecture, rho: &DensityMatrix) -> Result<FeatureVector> {
    arch.check_input(rho)?;
    Ok(FeatureVector {
        values: unit_diagonal(arch, 0, rho)?,
        blocks: 1,
    })
}

/// Concatenated single-unit features over all units.
pub fn features_sm(arch: &PreparedArchitecture, rho: &DensityMatrix) -> Result<FeatureVector> {
    arch.check_input(rho)?;
    let mut values = Vec::with_capacity(arch.spec.feature_len());
    for unit in 0..arch.readouts.len() {
        values.extend(unit_diagonal(arch, unit, rho)?);
    }
    Ok(FeatureVector {
        values,
        blocks: arch.readouts.len(),
    })
}

/// `n − 1` evolve-and-discard injections, then a full measurement of the last one.
pub fn features_mi(arch: &PreparedArchitecture, rho: &DensityMatrix) -> Result<FeatureVector> {
    arch.check_input(rho)?;
    let u = arch.unit_channels[0].unitary();
    let dims = [arch.input_dim(), 1 << arch.spec.reservoir_qubits];
    let mut eta = arch.reservoir_states[0].matrix().clone();
    for _ in 1..arch.spec.n {
        let evolved = u
            .mul_kron_right(&[rho.matrix().clone(), eta])?
            .matmul_adjoint(u)?;
        eta = partial_trace_matrix(&evolved, &dims, &[1])?;
    }
    Ok(FeatureVector {
        values: measured_diagonal(&arch.readouts[0], &[rho.matrix().clone(), eta])?,
        blocks: 1,
    })
}

/// Joint outcome probabilities of `Φ (⊗_i Γ_i(ρ⊗η_i)) Φ†` over all units.
pub fn features_d(arch: &PreparedArchitecture, rho: &DensityMatrix) -> Result<FeatureVector> {
    arch.check_input(rho)?;
    let factors: Vec<ComplexMatrix> = arch
        .reservoir_states
        .iter()
        .flat_map(|eta| [rho.matrix().clone(), eta.matrix().clone()])
        .collect();
    Ok(FeatureVector {
        values: measured_diagonal(&arch.readouts[0], &factors)?,
        blocks: 1,
    })
}

/// Features for many inputs at once.
///
/// Uses the architecture's real feature operator when it was small enough to
/// build, falling back to the per-sample path otherwise. Both agree to
/// rounding.
pub fn features_batch(
    arch: &PreparedArchitecture,
    inputs: &[DensityMatrix],
) -> Result<Vec<FeatureVector>> {
    for rho in inputs {
        arch.check_input(rho)?;
    }
    match &arch.feature_operator {
        Some(g) => povm::apply_feature_operator(arch, g, inputs),
        None => inputs.iter().map(|rho| arch.features(rho)).collect(),
    }
}
