//! Entanglement lifetime of polarization qubits under depolarization and
//! polarization-dependent loss.
//!
//! Each communication line is a trace-decreasing qubit semigroup. The
//! quantum Sinkhorn normal form `Υ = Φ_A ∘ Λ ∘ Φ_B` turns it into a unital
//! channel whose Pauli-diagonal parameters decide when the best two-qubit
//! encoding disentangles; transporting `|ψ₊⟩` back through `B ⊗ B'` gives that
//! encoding.
//!
//! Modules, bottom up:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, spectral functions.
//! - [`channel`]: Pauli transfer matrices, Choi matrices, channel predicates.
//! - [`pdl`]: the loss-and-noise model, closed form and RK4 oracle.
//! - [`sinkhorn`]: fixed-point iteration and the closed-form normal form.
//! - [`entanglement`]: negativity, conditional states, lifetime, optimal state.
//! - [`cli`]: the `qsink` command-line front end.

// index loops read closer to the matrix formulas than iterator chains
#![allow(clippy::needless_range_loop)]
// `!(x > tol)` is the NaN-rejecting form of `x <= tol`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod pdl;
pub mod sinkhorn;

pub use channel::PauliTransferMatrix;
pub use entanglement::{LifetimeResult, OptimalState, TwoQubitState};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use pdl::{AbcdCoefficients, ChannelParams};
pub use sinkhorn::SinkhornDecomposition;
