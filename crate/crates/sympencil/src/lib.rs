//! Structure theory of complex symmetric matrix pencils of bounded rank:
//! canonical forms under congruence, complete-eigenstructure extraction,
//! generic-bundle enumeration, codimension computation, and numerical
//! verification of the closure and degeneration claims behind them.
//!
//! The set of `n x n` complex symmetric pencils with normal rank at most
//! `r < n` is the union of the closures of `floor(r/2) + 1` congruence
//! bundles `bun(K_a)`. This crate builds the `K_a` forms, extracts complete
//! eigenstructures with a staircase algorithm (with an independent
//! block-Toeplitz rank oracle), computes orbit and bundle codimensions both
//! in closed form and numerically, and runs the Monte Carlo and degeneration
//! experiments that check the theory at desk scale.

pub mod anti_triangular;
pub mod canonical;
pub mod error;
pub mod experiments;
pub mod extract;
pub mod geometry;
pub mod linalg;
pub mod matrix;
pub mod order;
pub mod pencil;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use pencil::{EvalPoint, Pencil, SymmetricPencil};
