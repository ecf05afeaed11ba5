//! Eigensolvers, perturbative predictions and their comparison with exact
//! diagonalization.

pub mod eigen;
pub mod pt;
pub mod convergence;
pub mod scaling;
pub mod large_z;
pub mod report;
