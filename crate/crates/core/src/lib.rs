//! Noncommutative oscillators in 2+1 dimensions.
//!
//! The crate covers three layers:
//!
//! * [`lie`]: the deformed Heisenberg algebra as a structure-constant tensor,
//!   its Killing form, solvable radical and Levi factor.
//! * [`irrep`], [`fock`], [`nc`], [`dirac`]: truncated matrix realizations of
//!   the unitary sl(2,R) irreps, the two-mode Fock space and the shifted
//!   Schrödinger and Dirac oscillator Hamiltonians built from them.
//! * [`spectra`]: Hermitian eigensolvers, truncation-convergence analysis and
//!   the small/large-|z| perturbative comparisons.
//!
//! Units are ħ = 1; the mass `M` and frequency `ω` set all scales. Levi-Civita
//! symbols use ε₀₁₂ = +1 with indices moved by η = diag(1, −1, −1).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod half;
pub mod linalg;
pub mod operator;

pub mod dirac;
pub mod fock;
pub mod irrep;
pub mod lie;
pub mod nc;
pub mod spectra;

pub use error::{Error, Result};
pub use half::HalfInt;
pub use num_complex::Complex64;
pub use operator::{HermitianBuilder, HermitianOperator, SparseMatrix};
