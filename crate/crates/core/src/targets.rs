//! Target functionals of the input state.
//!
//! Logarithms are natural. Eigenvalues are clamped at zero before fractional
//! powers and logarithms.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::qcore::{
    eigvalsh, expectation, matrix_power, partial_trace_matrix, pauli_string, ComplexMatrix,
    DensityMatrix, HermitianObservable, Pauli, VALIDITY_TOL,
};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TargetKind {
    /// `Tr[O ρ]`.
    LinearObservable(HermitianObservable),
    /// `Tr[O ρᵏ]`.
    Polynomial {
        observable: HermitianObservable,
        degree: usize,
    },
    /// `Tr[ρ²]`.
    Purity,
    Renyi {
        alpha: f64,
    },
    VonNeumann,
    /// Two-qubit concurrence.
    Concurrence,
    /// Negativity across the `2|2` split.
    Negativity,
    BlochComponent(Axis),
    MutualInformation {
        dim_a: usize,
        dim_b: usize,
    },
}

/// A labelled target functional.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSpec {
    pub label: String,
    pub kind: TargetKind,
}

impl TargetSpec {
    pub fn new(label: impl Into<String>, kind: TargetKind) -> Result<Self> {
        match &kind {
            TargetKind::Polynomial { degree: 0, .. } => {
                return Err(Error::contract("polynomial degree must be at least 1"))
            }
            TargetKind::Renyi { alpha }
                if !(*alpha > 0.0 && *alpha != 1.0 && alpha.is_finite()) =>
            {
                return Err(Error::contract(
                    "Rényi order must be positive, finite and different from 1",
                ))
            }
            TargetKind::MutualInformation { dim_a, dim_b } if *dim_a < 1 || *dim_b < 1 => {
                return Err(Error::contract("bipartition dimensions must be positive"))
            }
            _ => {}
        }
        Ok(Self {
            label: label.into(),
            kind,
        })
    }

    /// `Tr[P ρ]` for a Pauli string such as `"XX"`.
    pub fn pauli(spec: &str) -> Result<Self> {
        let o = pauli_string(&Pauli::parse_string(spec)?)?;
        Self::new(format!("<{spec}>"), TargetKind::LinearObservable(o))
    }

    /// `Tr[P ρᵏ]` for a Pauli string; `"I"` strings give moments of the spectrum.
    pub fn pauli_polynomial(spec: &str, degree: usize) -> Result<Self> {
        let o = pauli_string(&Pauli::parse_string(spec)?)?;
        Self::new(
            format!("Tr[{spec} rho^{degree}]"),
            TargetKind::Polynomial {
                observable: o,
                degree,
            },
        )
    }

    pub fn purity() -> Self {
        Self {
            label: "purity".into(),
            kind: TargetKind::Purity,
        }
    }

    pub fn renyi(alpha: f64) -> Result<Self> {
        Self::new(format!("renyi_{alpha}"), TargetKind::Renyi { alpha })
    }

    pub fn concurrence() -> Self {
        Self {
            label: "concurrence".into(),
            kind: TargetKind::Concurrence,
        }
    }

    pub fn negativity() -> Self {
        Self {
            label: "negativity".into(),
            kind: TargetKind::Negativity,
        }
    }

    pub fn bloch(axis: Axis) -> Self {
        Self {
            label: format!("r_{axis}"),
            kind: TargetKind::BlochComponent(axis),
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        match &self.kind {
            TargetKind::LinearObservable(o) => expectation(o, rho),
            TargetKind::Polynomial { observable, degree } => {
                polynomial_target(observable, rho, *degree)
            }
            TargetKind::Purity => purity(rho),
            TargetKind::Renyi { alpha } => renyi_entropy(rho, *alpha),
            TargetKind::VonNeumann => von_neumann_entropy(rho),
            TargetKind::Concurrence => concurrence(rho),
            TargetKind::Negativity => negativity(rho),
            TargetKind::BlochComponent(axis) => bloch_component(rho, *axis),
            TargetKind::MutualInformation { dim_a, dim_b } => {
                mutual_information(rho, *dim_a, *dim_b)
            }
        }
    }
}

fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > VALIDITY_TOL {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

/// `Tr[O ρᵏ]`.
pub fn polynomial_target(o: &HermitianObservable, rho: &DensityMatrix, k: usize) -> Result<f64> {
    check_dim("polynomial_target", rho.dim(), o.dim())?;
    let power = matrix_power(rho, k)?;
    real_part(o.matrix().trace_product(&power)?)
}

pub fn purity(rho: &DensityMatrix) -> Result<f64> {
    real_part(rho.matrix().trace_product(rho.matrix())?)
}

fn clamped_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigvalsh(m)?.into_iter().map(|x| x.max(0.0)).collect())
}

/// `ln(Σ λᵅ) / (1 − α)`.
pub fn renyi_entropy(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::contract("Rényi order 1 is the von Neumann entropy"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::contract("Rényi order must be positive and finite"));
    }
    let sum: f64 = clamped_spectrum(rho.matrix())?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| libm::pow(l, alpha))
        .sum();
    Ok(libm::log(sum) / (1.0 - alpha))
}

/// `−Σ λ ln λ` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of(rho.matrix())
}

fn entropy_of(m: &ComplexMatrix) -> Result<f64> {
    Ok(clamped_spectrum(m)?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * libm::log(l))
        .sum())
}

/// `S(ρ_A) + S(ρ_B) − S(ρ_AB)`, clamped at zero.
pub fn mutual_information(rho_ab: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<f64> {
    check_dim("mutual_information", rho_ab.dim(), dim_a * dim_b)?;
    let dims = [dim_a, dim_b];
    let a = partial_trace_matrix(rho_ab.matrix(), &dims, &[0])?;
    let b = partial_trace_matrix(rho_ab.matrix(), &dims, &[1])?;
    let i = entropy_of(&a)? + entropy_of(&b)? - entropy_of(rho_ab.matrix())?;
    Ok(i.max(0.0))
}

/// Spin flip `(σy⊗σy) ρ* (σy⊗σy)`.
fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    // σy⊗σy is anti-diagonal with signs (−1, 1, 1, −1).
    let sign = [-1.0, 1.0, 1.0, -1.0];
    ComplexMatrix::from_fn(4, 4, |i, j| {
        rho[(3 - i, 3 - j)].conj() * (sign[i] * sign[j])
    })
}

/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λ` the decreasing square roots of the
/// eigenvalues of `ρ ρ̃`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_dim("concurrence", 4, rho.dim())?;
    let m = rho.matrix().matmul(&spin_flip(rho.matrix()))?;
    let values = m
        .view()
        .eigenvalues()
        .map_err(|e| Error::Numeric(format!("eigenvalue computation failed: {e:?}")))?;
    let mut lambda: Vec<f64> = values.iter().map(|z| libm::sqrt(z.re.max(0.0))).collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).clamp(0.0, 1.0))
}

/// Partial transpose on the second factor of a `dim_a × dim_b` system.
pub fn partial_transpose(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_dim("partial_transpose", rho.rows(), dim_a * dim_b)?;
    Ok(ComplexMatrix::from_fn(rho.rows(), rho.cols(), |r, c| {
        let (a, b) = (r / dim_b, r % dim_b);
        let (a2, b2) = (c / dim_b, c % dim_b);
        rho[(a * dim_b + b2, a2 * dim_b + b)]
    }))
}

/// `(‖ρ^{T_B}‖₁ − 1) / 2` for the `2|2` split.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    check_dim("negativity", 4, rho.dim())?;
    let pt = partial_transpose(rho.matrix(), 2, 2)?;
    let norm: f64 = eigvalsh(&pt)?.into_iter().map(f64::abs).sum();
    Ok((norm - 1.0) / 2.0)
}

/// `Tr[σ_axis ρ]` of a single qubit.
pub fn bloch_component(rho: &DensityMatrix, axis: Axis) -> Result<f64> {
    check_dim("bloch_component", 2, rho.dim())?;
    expectation(&pauli_string(&[axis.pauli()])?, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::HermitianObservable;

    fn bell() -> DensityMatrix {
        let s = 1.0 / libm::sqrt(2.0);
        DensityMatrix::pure(&[
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ])
        .unwrap()
    }

    fn werner(w: f64) -> DensityMatrix {
        let m = bell()
            .matrix()
            .scale(C64::new(w, 0.0))
            .add(&ComplexMatrix::identity(4).scale(C64::new((1.0 - w) / 4.0, 0.0)))
            .unwrap();
        DensityMatrix::new(m).unwrap()
    }

    fn qubit(p: f64, q: C64) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(p, 0.0),
            (1, 1) => C64::new(1.0 - p, 0.0),
            (0, 1) => q,
            _ => q.conj(),
        }))
        .unwrap()
    }

    #[test]
    fn polynomial_examples() {
        let id = HermitianObservable::identity(2);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((polynomial_target(&id, &mixed, 2).unwrap() - 0.5).abs() < 1e-15);

        let (p, q) = (0.7, C64::new(0.2, -0.15));
        let rho = qubit(p, q);
        let cube = 3.0 * p * p - 3.0 * p + 3.0 * q.norm_sqr() + 1.0;
        assert!((polynomial_target(&id, &rho, 3).unwrap() - cube).abs() < 1e-13);
        let x = pauli_string(&[Pauli::X]).unwrap();
        let xcube = (q + q.conj()).re * (p * p - p + q.norm_sqr() + 1.0);
        assert!((polynomial_target(&x, &rho, 3).unwrap() - xcube).abs() < 1e-13);
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::basis_state(2, 1).unwrap();
        assert!(renyi_entropy(&pure, 2.0).unwrap().abs() < 1e-14);
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(2);
        let ln2 = core::f64::consts::LN_2;
        assert!((renyi_entropy(&mixed, 2.0).unwrap() - ln2).abs() < 1e-14);
        assert!((von_neumann_entropy(&mixed).unwrap() - ln2).abs() < 1e-14);
        let d = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.75, 0.25])).unwrap();
        let expected = -0.5 * libm::log(0.75f64.powi(3) + 0.25f64.powi(3));
        assert!((renyi_entropy(&d, 3.0).unwrap() - expected).abs() < 1e-14);
        let d = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.9, 0.1])).unwrap();
        let expected = -0.9 * libm::log(0.9) - 0.1 * libm::log(0.1);
        assert!((von_neumann_entropy(&d).unwrap() - expected).abs() < 1e-14);
        assert!(renyi_entropy(&d, 1.0).is_err());
        assert!(renyi_entropy(&d, -1.0).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let ln2 = core::f64::consts::LN_2;
        let a = qubit(0.3, C64::new(0.1, 0.2));
        let b = qubit(0.6, C64::new(-0.2, 0.05));
        assert!(mutual_information(&a.tensor(&b).unwrap(), 2, 2).unwrap() < 1e-10);
        assert!((mutual_information(&bell(), 2, 2).unwrap() - 2.0 * ln2).abs() < 1e-12);
        let classical =
            DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert!((mutual_information(&classical, 2, 2).unwrap() - ln2).abs() < 1e-12);
        assert!(mutual_information(&classical, 2, 3).is_err());
    }

    #[test]
    fn entanglement_examples() {
        assert!((concurrence(&bell()).unwrap() - 1.0).abs() < 1e-7);
        assert!((negativity(&bell()).unwrap() - 0.5).abs() < 1e-12);
        let product = qubit(0.3, C64::new(0.1, 0.2))
            .tensor(&qubit(0.9, C64::new(0.1, 0.0)))
            .unwrap();
        assert!(concurrence(&product).unwrap() < 1e-7);
        assert!(negativity(&product).unwrap().abs() < 1e-12);
        assert!((concurrence(&werner(0.8)).unwrap() - 0.7).abs() < 1e-7);
        assert!((negativity(&werner(0.8)).unwrap() - 0.35).abs() < 1e-12);
        assert!(concurrence(&DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn bloch_examples() {
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        assert_eq!(bloch_component(&zero, Axis::Z).unwrap(), 1.0);
        let plus = DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap();
        assert!((bloch_component(&plus, Axis::X).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            assert_eq!(bloch_component(&mixed, axis).unwrap(), 0.0);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(TargetSpec::renyi(1.0).is_err());
        assert!(TargetSpec::pauli_polynomial("X", 0).is_err());
        assert!(TargetSpec::pauli("XQ").is_err());
        assert_eq!(TargetSpec::pauli("XX").unwrap().label, "<XX>");
    }
}
