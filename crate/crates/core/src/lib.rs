//! Numerical workbench for finite-dimensional quantum channels.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: dense complex linear algebra (Hermitian eigendecomposition, SVD,
//!   spectral powers, Kronecker products, partial traces, Schatten norms).
//! - [`channels`]: Kraus and Choi representations, validation, adjoints, tensor
//!   products, complementary channels and extremality tests.
//! - [`zoo`]: constructors for the concrete channel families (Werner-Holevo,
//!   depolarized WH, sub-unitary shift channels, ...).
//! - [`entropy`]: von Neumann and Rényi entropies of channel outputs.
//! - [`optimize`]: the output p-norm fixed-point iteration, multistart estimators and
//!   the multiplicativity scanner.
//! - [`decompose`]: Horn and two-block convex decompositions of block PSD matrices.
//!
//! All entropies are in nats. Choi matrices use the (input ⊗ output) leg order and are
//! normalized to unit trace.

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod decompose;
pub mod entropy;
mod error;
pub mod numerics;
pub mod optimize;
pub mod sample;
pub mod zoo;

pub use channels::{ChoiMatrix, KrausChannel};
pub use error::{Error, Result};
pub use numerics::{c64, ComplexMatrix};

/// Crate version embedded into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
