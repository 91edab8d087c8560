//! Transverse-field Ising Hamiltonians and the unitary channels built from them.
//!
//! `H = ½ Σ_{i>j} J_ij σx⁽ⁱ⁾σx⁽ʲ⁾ + h Σ_i σz⁽ⁱ⁾`. The Hamiltonian is real and
//! commutes with the global parity `Π σz`, so propagators are assembled one
//! parity sector at a time.

use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::qcore::{
    qubit_dim, real_symmetric_propagator, ComplexMatrix, DensityMatrix, HermitianObservable,
    RandomSource, DERIVED_TOL,
};
use crate::{Error, Result, C64};

/// Coupling scale, field and evolution time shared by every map of an architecture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsProfile {
    /// Couplings are drawn uniformly from `[-j_scale, j_scale]`.
    pub j_scale: f64,
    pub field: f64,
    pub time: f64,
}

impl DynamicsProfile {
    /// Ergodic regime: `J_s = 1`, `h = 1`, `t = 10`.
    pub const fn ergodic() -> Self {
        Self {
            j_scale: 1.0,
            field: 1.0,
            time: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j_scale.is_finite() && self.j_scale >= 0.0) {
            return Err(Error::contract(
                "coupling scale must be finite and non-negative",
            ));
        }
        if !self.field.is_finite() {
            return Err(Error::contract("field must be finite"));
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::contract(
                "evolution time must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

impl Default for DynamicsProfile {
    fn default() -> Self {
        Self::ergodic()
    }
}

/// A fully specified Ising instance on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingParams {
    n_qubits: usize,
    couplings: Vec<f64>,
    j_scale: f64,
    field: f64,
    time: f64,
}

impl IsingParams {
    /// `couplings` is the row-major `n × n` matrix `J`; it must be symmetric,
    /// and every off-diagonal entry must satisfy `|J_ij| ≤ j_scale`.
    pub fn new(
        n_qubits: usize,
        couplings: Vec<f64>,
        j_scale: f64,
        field: f64,
        time: f64,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::contract("Ising model needs at least one qubit"));
        }
        if couplings.len() != n_qubits * n_qubits {
            return Err(Error::DimensionMismatch {
                context: "coupling matrix",
                expected: n_qubits * n_qubits,
                found: couplings.len(),
            });
        }
        DynamicsProfile {
            j_scale,
            field,
            time,
        }
        .validate()?;
        for i in 0..n_qubits {
            for j in 0..i {
                let (a, b) = (couplings[i * n_qubits + j], couplings[j * n_qubits + i]);
                if !a.is_finite() || a != b {
                    return Err(Error::contract(
                        "coupling matrix must be finite and symmetric",
                    ));
                }
                if a.abs() > j_scale {
                    return Err(Error::contract("coupling exceeds the recorded scale"));
                }
            }
        }
        Ok(Self {
            n_qubits,
            couplings,
            j_scale,
            field,
            time,
        })
    }

    /// Draws fresh couplings for `n_qubits` qubits under `profile`.
    pub fn sample(
        n_qubits: usize,
        profile: &DynamicsProfile,
        rng: &mut RandomSource,
    ) -> Result<Self> {
        profile.validate()?;
        let couplings = sample_couplings(n_qubits, profile.j_scale, rng)?;
        Self::new(
            n_qubits,
            couplings,
            profile.j_scale,
            profile.field,
            profile.time,
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n_qubits + j]
    }

    /// Row-major coupling matrix.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn j_scale(&self) -> f64 {
        self.j_scale
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Diagonal entry `h Σ_i z_i` of basis state `b`.
    fn field_energy(&self, b: usize) -> f64 {
        let ones = b.count_ones() as f64;
        self.field * (self.n_qubits as f64 - 2.0 * ones)
    }

    /// `(mask, ½J_ij)` for every pair; `mask` flips qubits `i` and `j`.
    fn flip_terms(&self) -> Vec<(usize, f64)> {
        let n = self.n_qubits;
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..i {
                let jij = self.coupling(i, j);
                if jij != 0.0 {
                    terms.push(((1 << (n - 1 - i)) | (1 << (n - 1 - j)), 0.5 * jij));
                }
            }
        }
        terms
    }
}

/// Symmetric `n × n` matrix (row-major) with zero diagonal and the strictly
/// lower triangle i.i.d. uniform on `[-j_scale, j_scale]`.
pub fn sample_couplings(n_qubits: usize, j_scale: f64, rng: &mut RandomSource) -> Result<Vec<f64>> {
    if !(j_scale.is_finite() && j_scale >= 0.0) {
        return Err(Error::contract(
            "coupling scale must be finite and non-negative",
        ));
    }
    let mut j = vec![0.0; n_qubits * n_qubits];
    for a in 0..n_qubits {
        for b in 0..a {
            let v = rng.uniform(-j_scale, j_scale);
            j[a * n_qubits + b] = v;
            j[b * n_qubits + a] = v;
        }
    }
    Ok(j)
}

/// Dense `2ⁿ × 2ⁿ` Hamiltonian.
pub fn build_ising_hamiltonian(p: &IsingParams) -> Result<HermitianObservable> {
    let dim = qubit_dim(p.n_qubits)?;
    let mut h = ComplexMatrix::zeros(dim, dim);
    let terms = p.flip_terms();
    for b in 0..dim {
        h[(b, b)] = C64::new(p.field_energy(b), 0.0);
        for &(mask, w) in &terms {
            h[(b ^ mask, b)] += C64::new(w, 0.0);
        }
    }
    HermitianObservable::new(h)
}

/// `ρ ↦ U ρ U†`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryChannel {
    u: ComplexMatrix,
}

impl UnitaryChannel {
    /// Requires `max |U†U − I| ≤ 1e-9`.
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::contract("unitary must be square"));
        }
        let defect = u
            .dagger()
            .matmul(&u)?
            .max_abs_diff(&ComplexMatrix::identity(u.rows()));
        if defect > DERIVED_TOL {
            return Err(Error::Numeric(alloc::format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self { u })
    }

    pub(crate) fn from_trusted(u: ComplexMatrix) -> Self {
        Self { u }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            u: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `Γ₂ ∘ Γ₁` with `self = Γ₂`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        Ok(Self::from_trusted(self.u.matmul(&first.u)?))
    }
}

/// `exp(-i H t)` for the instance, computed sector by sector.
pub fn channel_from_ising(p: &IsingParams) -> Result<UnitaryChannel> {
    let dim = qubit_dim(p.n_qubits)?;
    let terms = p.flip_terms();
    let mut u = ComplexMatrix::zeros(dim, dim);
    for parity in [0u32, 1] {
        let sector: Vec<usize> = (0..dim).filter(|b| b.count_ones() % 2 == parity).collect();
        if sector.is_empty() {
            continue;
        }
        let mut position = vec![usize::MAX; dim];
        for (k, &b) in sector.iter().enumerate() {
            position[b] = k;
        }
        let m = sector.len();
        let mut block = Mat::<f64>::zeros(m, m);
        for (k, &b) in sector.iter().enumerate() {
            block[(k, k)] = p.field_energy(b);
            for &(mask, w) in &terms {
                block[(position[b ^ mask], k)] += w;
            }
        }
        let (re, im) = real_symmetric_propagator(block.as_ref(), p.time)?;
        for (a, &i) in sector.iter().enumerate() {
            for (b, &j) in sector.iter().enumerate() {
                u[(i, j)] = C64::new(re[(a, b)], im[(a, b)]);
            }
        }
    }
    if !u.is_finite() {
        return Err(Error::Numeric("propagator has non-finite entries".into()));
    }
    Ok(UnitaryChannel::from_trusted(u))
}

pub fn apply_channel(c: &UnitaryChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if c.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "apply_channel",
            expected: c.dim(),
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_trusted(
        rho.matrix().conjugate_by(&c.u)?,
    ))
}

/// Global Ising propagator over every qubit of every unit, with freshly
/// sampled couplings and the shared field and time.
pub fn build_entangling_map(
    unit_qubits: &[usize],
    profile: &DynamicsProfile,
    rng: &mut RandomSource,
) -> Result<UnitaryChannel> {
    if unit_qubits.is_empty() || unit_qubits.contains(&0) {
        return Err(Error::contract("every unit needs at least one qubit"));
    }
    let total: usize = unit_qubits.iter().sum();
    qubit_dim(total)?;
    channel_from_ising(&IsingParams::sample(total, profile, rng)?)
}
