//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's numerical kernels.

#![allow(dead_code)]

use num_complex::Complex64;
use pseudospectra::linalg::RealMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = Vec<Vec<Complex64>>; // column-major: cols[j][i]

/// Singular values by one-sided (Hestenes) Jacobi on the columns, sorted
/// nonincreasing.
pub fn jacobi_singular_values(mut cols: CMat) -> Vec<f64> {
    let n = cols.len();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|v| v.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|v| v.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= 1e-16 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // rotate the phase out of column q, then a real rotation
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..cols[p].len() {
                    let ap = cols[p][i];
                    let aq = cols[q][i] * phase.conj();
                    cols[p][i] = ap * c - aq * s;
                    cols[q][i] = ap * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Columns of `z I - A`.
pub fn shifted_columns(a: &RealMatrix, z: Complex64) -> CMat {
    let n = a.n();
    (0..n)
        .map(|j| (0..n).map(|i| if i == j { z - a.get(i, j) } else { Complex64::new(-a.get(i, j), 0.0) }).collect())
        .collect()
}

pub fn real_columns(a: &RealMatrix) -> CMat {
    let n = a.n();
    (0..n).map(|j| (0..n).map(|i| Complex64::new(a.get(i, j), 0.0)).collect()).collect()
}

pub fn oracle_smin(a: &RealMatrix, z: Complex64) -> f64 {
    *jacobi_singular_values(shifted_columns(a, z)).last().unwrap()
}

/// Gaussian elimination with partial pivoting on a row-major complex system.
pub fn solve(mut m: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&x, &y| m[x][k].norm().total_cmp(&m[y][k].norm())).unwrap();
        m.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
            let v = b[k];
            b[i] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    x
}

/// Banded matrix with entries uniform on {-1, 0, 1} inside the band; not
/// filtered for symmetry or conditioning.
pub fn random_band(n: usize, beta: usize, seed: u64) -> RealMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealMatrix::from_fn(n, |i, j| if i.abs_diff(j) <= beta { rng.random_range(-1i32..=1) as f64 } else { 0.0 }).unwrap()
}

/// Random symmetric matrix with standard-uniform entries in [-1, 1].
pub fn random_symmetric(n: usize, seed: u64) -> RealMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    RealMatrix::new(n, d).unwrap()
}

pub fn frobenius(cols: &CMat) -> f64 {
    cols.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &RealMatrix) -> Vec<f64> {
    let n = a.n();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
