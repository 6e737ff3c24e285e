use faer::{c64, Mat};

use crate::error::{Error, Result};

/// Dense real `n x n` matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    /// Builds a matrix from row-major entries. Requires `n >= 2` and finite values.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!("matrix dimension must be >= 2, got {n}")));
        }
        if data.len() != n * n {
            return Err(Error::param(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!(
                "non-finite entry at ({}, {})",
                pos / n,
                pos % n
            )));
        }
        Ok(RealMatrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::new(n, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n * n])
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Nilpotent shift: ones on the subdiagonal.
    pub fn shift(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j + 1 { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> RealMatrix {
        let n = self.n;
        RealMatrix {
            n,
            data: (0..n * n).map(|k| self.data[(k % n) * n + k / n]).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self + c I`.
    pub fn add_identity(&self, c: f64) -> RealMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += c;
        }
        out
    }

    pub fn scaled(&self, c: f64) -> RealMatrix {
        RealMatrix { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub(crate) fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// The explicit complex matrix `z I - A`.
    pub(crate) fn shifted(&self, z: c64) -> Mat<c64> {
        Mat::from_fn(self.n, self.n, |i, j| {
            let a = self.get(i, j);
            if i == j {
                c64::new(z.re - a, z.im)
            } else {
                c64::new(-a, 0.0)
            }
        })
    }

    /// Stable 64-bit fingerprint of the entries (FNV-1a over the bit patterns).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in std::iter::once(self.n as f64).chain(self.data.iter().copied()) {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}
