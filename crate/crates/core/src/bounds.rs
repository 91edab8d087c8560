//! Minimum reservoir sizes for informationally complete readouts.
//!
//! All bounds are exact integer arithmetic. A bound on Hilbert dimension is
//! rounded up to an integer dimension first and then to a qubit count.
//! Reservoirs within one architecture are equally sized.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::architectures::ArchitectureKind;
use crate::{Error, Result};

/// Qubit requirements of one architecture at one `(input size, n)` point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceReport {
    pub kind: ArchitectureKind,
    pub input_qubits: usize,
    pub n: usize,
    pub min_reservoir_dim: BigUint,
    /// Qubits per reservoir, `⌈log₂ min_reservoir_dim⌉`.
    pub reservoir_qubits: usize,
    /// Input plus one reservoir.
    pub unit_qubits: usize,
    /// Reservoir qubits summed over all reservoirs.
    pub total_reservoir_qubits: usize,
    /// Every qubit of the architecture, including all input copies held at once.
    pub total_qubits: usize,
    pub pvm_outcomes: BigUint,
}

/// Symmetric-subspace dimension `C(s² − 1 + n, n)`.
pub fn sym_dim(s: usize, n: usize) -> Result<BigUint> {
    if s < 2 || n < 1 {
        return Err(Error::contract("sym_dim needs s ≥ 2 and n ≥ 1"));
    }
    let s2 = (s as u128)
        .checked_mul(s as u128)
        .ok_or(Error::DimensionLimit {
            requested: u128::MAX,
            limit: usize::MAX,
        })?;
    let top = BigUint::from(s2 - 1);
    let mut acc = BigUint::one();
    // C(m + n, n) = Π_{k=1..n} (m + k) / k, exact at every step.
    for k in 1..=n as u64 {
        acc = acc * (&top + BigUint::from(k)) / BigUint::from(k);
    }
    Ok(acc)
}

fn check_input_dim(s: usize) -> Result<usize> {
    if s < 2 || !s.is_power_of_two() {
        return Err(Error::contract(
            "input dimension must be a power of two, at least 2",
        ));
    }
    Ok(s.trailing_zeros() as usize)
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    (a + b - BigUint::one()) / b
}

/// Smallest `m` with `mⁿ ≥ x`.
fn ceil_nth_root(x: &BigUint, n: u32) -> BigUint {
    let m = x.nth_root(n);
    if m.pow(n) < *x {
        m + BigUint::one()
    } else {
        m
    }
}

/// `⌈log₂ d⌉`, i.e. the qubits needed to hold dimension `d ≥ 1`.
fn qubits_for(d: &BigUint) -> usize {
    if d.is_zero() || d.is_one() {
        0
    } else {
        (d - BigUint::one()).bits() as usize
    }
}

fn report(kind: ArchitectureKind, s: usize, n: usize, min_dim: BigUint) -> Result<ResourceReport> {
    let input_qubits = check_input_dim(s)?;
    let reservoir_qubits = qubits_for(&min_dim);
    let unit_qubits = input_qubits + reservoir_qubits;
    let (total_reservoir_qubits, total_qubits, pvm_exponent, pvm_factor) = match kind {
        ArchitectureKind::S3L | ArchitectureKind::MI => {
            (reservoir_qubits, unit_qubits, unit_qubits, 1)
        }
        ArchitectureKind::SM => (n * reservoir_qubits, n * unit_qubits, unit_qubits, n),
        ArchitectureKind::D => (n * reservoir_qubits, n * unit_qubits, n * unit_qubits, 1),
    };
    Ok(ResourceReport {
        kind,
        input_qubits,
        n,
        min_reservoir_dim: min_dim,
        reservoir_qubits,
        unit_qubits,
        total_reservoir_qubits,
        total_qubits,
        pvm_outcomes: BigUint::from(pvm_factor) << pvm_exponent,
    })
}

/// `dim(H_R) ≥ s`.
pub fn s3l_bound(s: usize) -> Result<ResourceReport> {
    report(ArchitectureKind::S3L, s, 1, BigUint::from(s))
}

/// `dim(H_R) ≥ (s + (n − 1)/s) / n`, evaluated as `⌈(s² + n − 1) / (n s)⌉`.
pub fn sm_bound(s: usize, n: usize) -> Result<ResourceReport> {
    check_n(n)?;
    let s_big = BigUint::from(s);
    let num = &s_big * &s_big + BigUint::from(n - 1);
    let den = BigUint::from(n) * &s_big;
    report(ArchitectureKind::SM, s, n, ceil_div(&num, &den))
}

/// `dim(H_R) ≥ d_sn / s`.
pub fn mi_bound(s: usize, n: usize) -> Result<ResourceReport> {
    check_n(n)?;
    let d = sym_dim(s, n)?;
    report(ArchitectureKind::MI, s, n, ceil_div(&d, &BigUint::from(s)))
}

/// `dim(H_R) ≥ d_sn^{1/n} / s`: the smallest `D` with `(D s)ⁿ ≥ d_sn`.
pub fn d_bound(s: usize, n: usize) -> Result<ResourceReport> {
    check_n(n)?;
    let d = sym_dim(s, n)?;
    let exponent = u32::try_from(n).map_err(|_| Error::contract("n is too large"))?;
    let root = ceil_nth_root(&d, exponent);
    report(
        ArchitectureKind::D,
        s,
        n,
        ceil_div(&root, &BigUint::from(s)),
    )
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::contract("n must be at least 1"));
    }
    Ok(())
}

pub fn bound(kind: ArchitectureKind, s: usize, n: usize) -> Result<ResourceReport> {
    match kind {
        ArchitectureKind::S3L => {
            if n != 1 {
                return Err(Error::contract("S3L has exactly one unit"));
            }
            s3l_bound(s)
        }
        ArchitectureKind::SM => sm_bound(s, n),
        ArchitectureKind::MI => mi_bound(s, n),
        ArchitectureKind::D => d_bound(s, n),
    }
}

/// Reports for every `(input_qubits, n)` cell, input-major.
pub fn requirement_table(
    kind: ArchitectureKind,
    input_qubits: core::ops::RangeInclusive<usize>,
    n_range: core::ops::RangeInclusive<usize>,
) -> Result<Vec<ResourceReport>> {
    if input_qubits.is_empty() || n_range.is_empty() {
        return Err(Error::contract("ranges must be non-empty"));
    }
    let mut rows = Vec::new();
    for q in input_qubits {
        if q == 0 || q >= usize::BITS as usize - 1 {
            return Err(Error::contract("input qubit count out of range"));
        }
        let ns = if kind == ArchitectureKind::S3L {
            1..=1
        } else {
            n_range.clone()
        };
        for n in ns {
            rows.push(bound(kind, 1 << q, n)?);
        }
    }
    Ok(rows)
}

impl ResourceReport {
    /// Minimum reservoir dimension as a machine integer, if it fits.
    pub fn min_reservoir_dim_u64(&self) -> Option<u64> {
        self.min_reservoir_dim.to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::ops::RangeInclusive;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn symmetric_dimensions() {
        assert_eq!(sym_dim(2, 2).unwrap(), big(10));
        assert_eq!(sym_dim(4, 2).unwrap(), big(136));
        assert_eq!(sym_dim(4, 3).unwrap(), big(816));
        assert_eq!(sym_dim(4, 4).unwrap(), big(3876));
        assert_eq!(sym_dim(2, 5).unwrap(), big(56));
        assert_eq!(sym_dim(2, 1).unwrap(), big(4));
        assert!(sym_dim(1, 2).is_err());
    }

    #[test]
    fn single_reservoir() {
        assert_eq!(s3l_bound(4).unwrap().reservoir_qubits, 2);
        assert_eq!(s3l_bound(8).unwrap().reservoir_qubits, 3);
        assert_eq!(s3l_bound(2).unwrap().reservoir_qubits, 1);
        assert!(s3l_bound(6).is_err());
    }

    #[test]
    fn multiplexed() {
        let r = sm_bound(8, 5).unwrap();
        assert_eq!(
            (r.min_reservoir_dim.clone(), r.reservoir_qubits),
            (big(2), 1)
        );
        let r = sm_bound(4, 2).unwrap();
        assert_eq!(
            (r.min_reservoir_dim.clone(), r.reservoir_qubits),
            (big(3), 2)
        );
        let r = sm_bound(4, 3).unwrap();
        assert_eq!(
            (r.min_reservoir_dim.clone(), r.reservoir_qubits),
            (big(2), 1)
        );
        assert_eq!(r.pvm_outcomes, big(24));
    }

    #[test]
    fn multiple_injections() {
        let r = mi_bound(4, 2).unwrap();
        assert_eq!(
            (r.min_reservoir_dim.clone(), r.reservoir_qubits),
            (big(34), 6)
        );
        assert_eq!(r.total_qubits, 8);
        assert_eq!(mi_bound(2, 1).unwrap().reservoir_qubits, 1);
        let r = mi_bound(2, 2).unwrap();
        assert_eq!(
            (r.min_reservoir_dim.clone(), r.reservoir_qubits),
            (big(5), 3)
        );
    }

    #[test]
    fn distributed() {
        let r = d_bound(4, 2).unwrap();
        assert_eq!(
            (r.min_reservoir_dim.clone(), r.reservoir_qubits),
            (big(3), 2)
        );
        assert_eq!(r.total_qubits, 8);
        assert_eq!(r.pvm_outcomes, big(256));
        let r = d_bound(2, 5).unwrap();
        assert_eq!(
            (r.min_reservoir_dim.clone(), r.reservoir_qubits),
            (big(2), 1)
        );
        for s in [2, 4, 8, 16] {
            assert_eq!(
                d_bound(s, 1).unwrap().min_reservoir_dim,
                s3l_bound(s).unwrap().min_reservoir_dim
            );
        }
    }

    #[test]
    fn nth_root_is_exact_at_perfect_powers() {
        assert_eq!(ceil_nth_root(&big(27), 3), big(3));
        assert_eq!(ceil_nth_root(&big(28), 3), big(4));
        assert_eq!(ceil_nth_root(&big(1), 5), big(1));
    }

    #[test]
    fn tables_have_expected_shape() {
        let t = requirement_table(ArchitectureKind::SM, 1..=3, 1..=5).unwrap();
        assert_eq!(t.len(), 15);
        let s3l = requirement_table(ArchitectureKind::S3L, 1..=3, 1..=5).unwrap();
        assert_eq!(s3l.len(), 3);
        assert!(requirement_table(ArchitectureKind::D, RangeInclusive::new(1, 0), 1..=2).is_err());
    }
}
