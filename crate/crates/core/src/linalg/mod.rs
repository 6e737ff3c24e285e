//! Exact numerical kernels: grids, eigenvalues, minimum singular values,
//! sensitivity masks and binary morphology.

pub mod field;
pub mod grid;
pub mod kernels;
pub mod matrix;

pub use field::{dilate, sensitive_zone, BinaryMask, SigmaField};
pub use grid::{make_grid, ComplexGrid};
pub use kernels::{
    eigen_decomposition, eigenvalues, full_pseudospectrum, restricted_pseudospectrum, singular_values, smin_at,
};
pub use matrix::RealMatrix;
