//! Extremal symmetries for idempotent matrices in finite-dimensional Krein spaces.
//!
//! Given an idempotent `P` and a symmetry `J` (`J = J* = J^-1`), this crate
//! builds the Loewner-extremal symmetries making `P` J-positive or
//! J-contractive, the parameterized families those symmetries live in, the
//! contractive/expansive and positive/negative splittings of J-projections,
//! and the unitary intertwiners relating `P`, `P*` and `I - P`.
//!
//! Batch work (sampling, probes) runs on rayon when the `parallel` feature is
//! enabled and falls back to plain iterators otherwise.

pub mod decomp;
pub mod error;
pub mod numcore;
pub mod par;
pub mod projform;
pub mod symfactory;
pub mod verify;

pub use error::{KreinError, Result};
pub use numcore::{CMatrix, ToleranceConfig};
