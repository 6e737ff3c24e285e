//! Pseudospectra of non-normal banded matrices with neural-guided domain
//! restriction.
//!
//! A small dual-path classifier predicts which points of a complex-plane grid
//! are spectrally sensitive; exact minimum singular values of `z I - A` are
//! then computed only inside the predicted region.

pub mod error;
pub mod exec;
pub mod features;
pub mod io;
pub mod linalg;
pub mod matrix_gen;
pub mod neural;
pub mod pipeline;
pub mod seed;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64;
