//! Weighted spectral theory for operators on finite-dimensional matrix
//! *-algebras.
//!
//! A nonzero positive semidefinite weight `A` induces the semi-inner product
//! `<A h, h>` and with it a seminorm, an adjoint, a notion of invertibility
//! and a spectrum for the operators that leave the kernel of `A` invariant.
//! This crate computes those objects along mutually checking routes
//! (range-space compression, Hermitian-pencil conditions, pure-state
//! functionals, Gelfand limits), fuzzes the algebraic laws they satisfy with
//! seeded reproducible trials, and reconstructs two classical weighted-shift
//! models by truncation.

pub mod error;
pub mod io;
pub mod laws;
pub mod linalg;
pub mod multiset;
pub mod shiftlab;
pub mod spectrum;
pub mod tolerance;
pub mod weight;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use tolerance::ToleranceConfig;
pub use weight::{AOperator, PositiveWeight};

pub use num_complex::Complex64;
