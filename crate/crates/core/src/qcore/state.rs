use alloc::format;
use alloc::vec::Vec;
use core::str::FromStr;

use super::expm::eigvalsh;
use super::matrix::{kron, kron_all, partial_trace as partial_trace_matrix, ComplexMatrix};
use super::rng::RandomSource;
use super::{check_dim, VALIDITY_TOL};
use crate::{Error, Result, C64};

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at [`VALIDITY_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidState(
                "matrix must be square and non-empty".into(),
            ));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("entries must be finite".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > VALIDITY_TOL || tr.im.abs() > VALIDITY_TOL {
            return Err(Error::InvalidState(format!("trace {} differs from 1", tr)));
        }
        let min = eigvalsh(&matrix)?.first().copied().unwrap_or(0.0);
        if min < -VALIDITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a valid state by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = libm::sqrt(psi.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(
                "state vector must be non-zero and finite".into(),
            ));
        }
        let n = psi.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Ok(Self { matrix: m })
    }

    /// `|k⟩⟨k|` in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::contract("basis index out of range"));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    /// Single-qubit state from a Bloch vector with `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new((1.0 + r[2]) / 2.0, 0.0),
            (1, 1) => C64::new((1.0 - r[2]) / 2.0, 0.0),
            (0, 1) => C64::new(r[0] / 2.0, -r[1] / 2.0),
            _ => C64::new(r[0] / 2.0, r[1] / 2.0),
        });
        Self::new(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        self.matrix
            .trace_product(&self.matrix)
            .map(|z| z.re)
            .unwrap_or(f64::NAN)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_trusted(kron(&self.matrix, &other.matrix)?))
    }

    /// `self^{⊗n}`.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("tensor power needs n ≥ 1"));
        }
        check_dim((self.dim() as u128).saturating_pow(n as u32))?;
        let copies: Vec<ComplexMatrix> = (0..n).map(|_| self.matrix.clone()).collect();
        Ok(Self::from_trusted(kron_all(&copies)?))
    }

    pub fn partial_trace(&self, subsystem_dims: &[usize], keep: &[usize]) -> Result<Self> {
        partial_trace(self, subsystem_dims, keep)
    }
}

/// Reduced state on the subsystems in `keep`.
pub fn partial_trace(
    rho: &DensityMatrix,
    subsystem_dims: &[usize],
    keep: &[usize],
) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_trusted(partial_trace_matrix(
        &rho.matrix,
        subsystem_dims,
        keep,
    )?))
}

/// Hermitian operator used as an observable or effective POVM element.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianObservable {
    matrix: ComplexMatrix,
}

impl HermitianObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::contract("observable must be square"));
        }
        let defect = matrix.hermiticity_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.matrix)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let v = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        ComplexMatrix::from_raw(2, 2, v.to_vec())
    }

    /// Parses a string such as `"XZI"` into one Pauli per qubit.
    pub fn parse_string(s: &str) -> Result<Vec<Pauli>> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::contract(format!("unknown Pauli label '{other}'"))),
            })
            .collect()
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match Pauli::parse_string(s)?.as_slice() {
            [p] => Ok(*p),
            _ => Err(Error::contract("expected a single Pauli label")),
        }
    }
}

/// Kronecker product of single-qubit Paulis, qubit 0 leftmost.
pub fn pauli_string(spec: &[Pauli]) -> Result<HermitianObservable> {
    if spec.is_empty() {
        return Err(Error::contract("Pauli string must be non-empty"));
    }
    let factors: Vec<ComplexMatrix> = spec.iter().map(|p| p.matrix()).collect();
    Ok(HermitianObservable::from_trusted(kron_all(&factors)?))
}

/// `Tr[O ρ]`; fails if the imaginary part exceeds [`VALIDITY_TOL`].
pub fn expectation(o: &HermitianObservable, rho: &DensityMatrix) -> Result<f64> {
    if o.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "expectation",
            expected: rho.dim(),
            found: o.dim(),
        });
    }
    let z = o.matrix.trace_product(&rho.matrix)?;
    if z.im.abs() > VALIDITY_TOL {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

/// `ρ^k` by repeated multiplication.
pub fn matrix_power(rho: &DensityMatrix, k: usize) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(Error::contract("matrix_power needs k ≥ 1"));
    }
    let mut acc = rho.matrix.clone();
    for _ in 1..k {
        acc = acc.matmul(&rho.matrix)?;
    }
    Ok(acc)
}

/// Ensemble used for randomly generated states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ensemble {
    /// Hilbert–Schmidt measure: `G G† / Tr(G G†)` with Ginibre `G`.
    #[default]
    Ginibre,
    /// Haar-random pure states.
    HaarPure,
}

impl Ensemble {
    pub fn sample(self, dim: usize, rng: &mut RandomSource) -> Result<DensityMatrix> {
        match self {
            Ensemble::Ginibre => random_density_matrix(dim, rng),
            Ensemble::HaarPure => random_pure_state(dim, rng),
        }
    }
}

/// Hilbert–Schmidt random state of dimension `dim ≥ 2`.
pub fn random_density_matrix(dim: usize, rng: &mut RandomSource) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::contract("random_density_matrix needs dim ≥ 2"));
    }
    check_dim(dim as u128)?;
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.complex_normal());
    let ggd = g.matmul_adjoint(&g)?;
    let tr = ggd.trace().re;
    let mut m = ggd.scale(C64::new(1.0 / tr, 0.0));
    // Symmetrize away rounding so the Hermiticity check is exact.
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in 0..i {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// Haar-random pure state of dimension `dim ≥ 2`.
pub fn random_pure_state(dim: usize, rng: &mut RandomSource) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::contract("random_pure_state needs dim ≥ 2"));
    }
    check_dim(dim as u128)?;
    let psi: Vec<C64> = (0..dim).map(|_| rng.complex_normal()).collect();
    DensityMatrix::pure(&psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pauli_strings() {
        let z = pauli_string(&[Pauli::Z]).unwrap();
        assert_eq!(z.matrix(), &Pauli::Z.matrix());
        let xx = pauli_string(&Pauli::parse_string("XX").unwrap()).unwrap();
        assert_eq!(
            xx.matrix(),
            &kron(&Pauli::X.matrix(), &Pauli::X.matrix()).unwrap()
        );
        let zii = pauli_string(&[Pauli::Z, Pauli::I, Pauli::I]).unwrap();
        assert_eq!(
            zii.matrix(),
            &ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0])
        );
        assert!(pauli_string(&[]).is_err());
        assert!(Pauli::parse_string("XQ").is_err());
    }

    #[test]
    fn expectation_examples() {
        let rho = DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| {
            C64::new(
                if i == j { 0.5 } else { 0.2 },
                if i < j {
                    0.1
                } else if i > j {
                    -0.1
                } else {
                    0.0
                },
            )
        }))
        .unwrap();
        assert!(approx(
            expectation(&HermitianObservable::identity(2), &rho).unwrap(),
            1.0,
            1e-15
        ));
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        assert_eq!(
            expectation(&pauli_string(&[Pauli::Z]).unwrap(), &zero).unwrap(),
            1.0
        );
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(
            expectation(&pauli_string(&[Pauli::X]).unwrap(), &mixed).unwrap(),
            0.0
        );
        assert!(expectation(&HermitianObservable::identity(4), &mixed).is_err());
    }

    #[test]
    fn matrix_power_examples() {
        let mut rng = RandomSource::new(3, 0);
        let rho = random_density_matrix(3, &mut rng).unwrap();
        assert_eq!(matrix_power(&rho, 1).unwrap(), *rho.matrix());
        let pure = random_pure_state(4, &mut rng).unwrap();
        assert!(matrix_power(&pure, 5).unwrap().max_abs_diff(pure.matrix()) < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        let cube = matrix_power(&mixed, 3).unwrap();
        assert!(cube.max_abs_diff(&ComplexMatrix::identity(2).scale(C64::new(0.125, 0.0))) < 1e-16);
        assert!(matrix_power(&mixed, 0).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5])).is_err());
        let mut m = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian(_))));
        assert!(DensityMatrix::from_bloch([0.3, -0.4, 0.5]).is_ok());
        assert!(DensityMatrix::from_bloch([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = RandomSource::new(1, 0);
        for dim in [2, 3, 4, 8] {
            let rho = random_density_matrix(dim, &mut rng).unwrap();
            assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
            let psi = random_pure_state(dim, &mut rng).unwrap();
            assert!(approx(psi.purity(), 1.0, 1e-12));
        }
        assert!(random_density_matrix(1, &mut rng).is_err());
    }
}
