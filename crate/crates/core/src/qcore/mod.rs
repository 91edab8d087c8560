//! Dense complex linear algebra and quantum-state primitives.
//!
//! Qubit 0 is always the leftmost tensor factor, i.e. the most significant bit
//! of a computational-basis index.

mod expm;
mod matrix;
mod rng;
mod state;

use core::sync::atomic::{AtomicUsize, Ordering};

pub use expm::{eigh, expm_hermitian, Eigh};
pub(crate) use expm::{eigvalsh, real_symmetric_propagator};
pub use matrix::{kron, kron_all, partial_trace as partial_trace_matrix, ComplexMatrix};
pub use rng::RandomSource;
pub use state::{
    expectation, matrix_power, partial_trace, pauli_string, random_density_matrix,
    random_pure_state, DensityMatrix, Ensemble, HermitianObservable, Pauli,
};

use crate::{Error, Result};

/// Tolerance for validity checks (Hermiticity, unit trace, positivity).
pub const VALIDITY_TOL: f64 = 1e-10;
/// Tolerance for quantities derived through a decomposition.
pub const DERIVED_TOL: f64 = 1e-9;

pub const DEFAULT_MAX_DIM: usize = 1 << 16;

static MAX_DIM: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_DIM);

/// Largest Hilbert-space dimension any operation may materialize.
pub fn max_dim() -> usize {
    MAX_DIM.load(Ordering::Relaxed)
}

/// Override the global dimension cap (process wide).
pub fn set_max_dim(limit: usize) {
    MAX_DIM.store(limit.max(1), Ordering::Relaxed);
}

pub(crate) fn check_dim(requested: u128) -> Result<usize> {
    let limit = max_dim();
    if requested > limit as u128 {
        return Err(Error::DimensionLimit { requested, limit });
    }
    Ok(requested as usize)
}

/// Dimension of `qubits` qubits, subject to the global cap.
pub fn qubit_dim(qubits: usize) -> Result<usize> {
    if qubits >= 127 {
        return Err(Error::DimensionLimit {
            requested: u128::MAX,
            limit: max_dim(),
        });
    }
    check_dim(1u128 << qubits)
}
