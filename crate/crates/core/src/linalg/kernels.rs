//! Dense decompositions: eigenvalues, singular values and the `sigma_min` field.

use faer::{c64, Mat};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::field::{BinaryMask, SigmaField};
use crate::linalg::grid::ComplexGrid;
use crate::linalg::matrix::RealMatrix;

/// Eigenvalues of `a` (with multiplicity). Complex eigenvalues of a real matrix
/// come out in exact conjugate pairs.
pub fn eigenvalues(a: &RealMatrix) -> Result<Vec<Complex64>> {
    a.to_faer().eigenvalues().map_err(|e| Error::Numerical {
        operation: "eigenvalues",
        context: format!("{e:?}"),
    })
}

/// Eigenvalues together with the eigenvector matrix (columns of unit 2-norm).
pub fn eigen_decomposition(a: &RealMatrix) -> Result<(Vec<Complex64>, Mat<c64>)> {
    let evd = a.to_faer().eigen().map_err(|e| Error::Numerical {
        operation: "eigendecomposition",
        context: format!("{e:?}"),
    })?;
    let values: Vec<Complex64> = (0..a.n()).map(|k| evd.S()[k]).collect();
    let mut vectors = evd.U().to_owned();
    for j in 0..vectors.ncols() {
        let norm = (0..vectors.nrows()).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..vectors.nrows() {
                vectors[(i, j)] /= norm;
            }
        }
    }
    Ok((values, vectors))
}

/// Singular values of a real matrix, nonincreasing.
pub fn singular_values(a: &RealMatrix) -> Result<Vec<f64>> {
    a.to_faer().singular_values().map_err(|e| Error::Numerical {
        operation: "singular values",
        context: format!("{e:?}"),
    })
}

/// Singular values of a complex matrix, nonincreasing.
pub(crate) fn complex_singular_values(m: &Mat<c64>) -> Result<Vec<f64>> {
    m.singular_values().map_err(|e| Error::Numerical {
        operation: "complex singular values",
        context: format!("{e:?}"),
    })
}

/// Smallest singular value of `z I - A`, from a full SVD of the explicitly
/// formed shifted matrix.
pub fn smin_at(a: &RealMatrix, z: Complex64) -> Result<f64> {
    let sv = complex_singular_values(&a.shifted(z)).map_err(|e| match e {
        Error::Numerical { operation, context } => Error::Numerical {
            operation,
            context: format!("{context} at z = {z}"),
        },
        other => other,
    })?;
    Ok(sv.last().copied().unwrap_or(0.0).max(0.0))
}

/// `sigma_min` at every grid point.
pub fn full_pseudospectrum(a: &RealMatrix, grid: &ComplexGrid, exec: &Exec) -> Result<SigmaField> {
    grid.validate()?;
    let values = exec.try_map(grid.len(), |k| smin_at_index(a, grid, k))?;
    SigmaField::dense(*grid, values)
}

/// `sigma_min` only where `region` is set; every other point stays unevaluated.
pub fn restricted_pseudospectrum(
    a: &RealMatrix,
    grid: &ComplexGrid,
    region: &BinaryMask,
    exec: &Exec,
) -> Result<SigmaField> {
    grid.validate()?;
    if !region.matches_grid(grid) {
        return Err(Error::param("region mask does not match the grid"));
    }
    let points: Vec<usize> = (0..grid.len()).filter(|&k| region.bits()[k]).collect();
    let computed = exec.try_map(points.len(), |p| smin_at_index(a, grid, points[p]))?;
    let mut values = vec![None; grid.len()];
    for (k, v) in points.into_iter().zip(computed) {
        values[k] = Some(v);
    }
    SigmaField::new(*grid, values)
}

fn smin_at_index(a: &RealMatrix, grid: &ComplexGrid, k: usize) -> Result<f64> {
    smin_at(a, grid.point_at(k)).map_err(|e| match e {
        Error::Numerical { operation, context } => Error::Numerical {
            operation,
            context: format!("{context}, grid index ({}, {})", k / grid.nx, k % grid.nx),
        },
        other => other,
    })
}

/// Solves `(z I - A) x = b` by partial-pivoting LU. Returns `None` if the
/// shifted matrix is numerically singular.
pub(crate) fn solve_shifted(a: &RealMatrix, z: Complex64, b: &[f64]) -> Option<Vec<Complex64>> {
    use faer::linalg::solvers::Solve;
    let m = a.shifted(z);
    let lu = m.partial_piv_lu();
    let rhs = Mat::from_fn(b.len(), 1, |i, _| c64::new(b[i], 0.0));
    let x = lu.solve(&rhs);
    let out: Vec<Complex64> = (0..b.len()).map(|i| x[(i, 0)]).collect();
    out.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then_some(out)
}
