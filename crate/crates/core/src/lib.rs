//! Quantum extreme learning machines on density matrices.
//!
//! The crate simulates four readout architectures that learn functions of an
//! input quantum state from computational-basis outcome probabilities:
//!
//! * `S3L`: one input coupled to one reservoir, measured once.
//! * `SM`: several independent input/reservoir units in parallel.
//! * `MI`: repeated injections of the input into a single reservoir.
//! * `D`: parallel units entangled by an extra global unitary.
//!
//! Everything here is pure computation over `alloc`; file formats, the CLI and
//! thread pools live in the companion `qelm` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod architectures;
pub mod bounds;
pub mod dynamics;
mod error;
pub mod learn;
pub mod qcore;
pub mod targets;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
