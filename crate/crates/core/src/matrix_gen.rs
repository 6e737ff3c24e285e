//! Random banded non-normal test matrices.
//!
//! Entries inside the band `|i - j| <= beta` are i.i.d. uniform on `{-1, 0, 1}`;
//! everything outside is zero. Symmetric draws and draws with
//! `kappa(A) >= cond_cap` are rejected and redrawn. Tridiagonal draws at
//! n = 64 are singular almost every time, so the default rejection budget is
//! large.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{singular_values, RealMatrix};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub bandwidths: Vec<usize>,
    pub cond_cap: f64,
    pub seed: u64,
    pub max_rejects: usize,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec { n: 64, bandwidths: vec![1, 2, 3, 4], cond_cap: 1e8, seed: 0, max_rejects: 1_000_000 }
    }
}

impl GenSpec {
    pub fn with_seed(&self, seed: u64) -> GenSpec {
        GenSpec { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param(format!("matrix dimension must be >= 2, got {}", self.n)));
        }
        if self.bandwidths.is_empty() {
            return Err(Error::param("bandwidth set is empty"));
        }
        if let Some(b) = self.bandwidths.iter().find(|b| **b == 0 || **b >= self.n) {
            return Err(Error::param(format!("bandwidth {b} outside 1..={}", self.n - 1)));
        }
        if !(self.cond_cap > 1.0) {
            return Err(Error::param(format!("condition cap must exceed 1, got {}", self.cond_cap)));
        }
        Ok(())
    }
}

/// An accepted draw.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedMatrix {
    pub index: usize,
    pub seed: u64,
    pub bandwidth: usize,
    pub kappa: f64,
    pub matrix: RealMatrix,
}

/// Spectral condition number `sigma_1 / sigma_n` from a full SVD
/// (infinite for singular matrices).
pub fn condition_number(a: &RealMatrix) -> Result<f64> {
    let sv = singular_values(a)?;
    let smax = sv[0];
    let smin = *sv.last().unwrap();
    Ok(if smin > 0.0 { smax / smin } else { f64::INFINITY })
}

/// Draws one accepted matrix from `spec.seed`.
pub fn random_banded(spec: &GenSpec) -> Result<GeneratedMatrix> {
    spec.validate()?;
    let mut rng = seed::rng(spec.seed);
    let n = spec.n;
    // The bandwidth is fixed per matrix; only the entries are redrawn.
    let beta = *spec.bandwidths.choose(&mut rng).expect("nonempty bandwidth set");
    let (mut symmetric, mut ill_conditioned, mut numerical) = (0, 0, 0);
    for _ in 0..=spec.max_rejects {
        let data: Vec<f64> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if i.abs_diff(j) <= beta {
                    rng.random_range(0..3) as f64 - 1.0
                } else {
                    0.0
                }
            })
            .collect();
        let a = RealMatrix::new(n, data)?;
        if a.is_symmetric() {
            symmetric += 1;
            continue;
        }
        match condition_number(&a) {
            Ok(kappa) if kappa < spec.cond_cap => {
                return Ok(GeneratedMatrix { index: 0, seed: spec.seed, bandwidth: beta, kappa, matrix: a });
            }
            Ok(_) => ill_conditioned += 1,
            Err(_) => numerical += 1,
        }
    }
    Err(Error::Generation { attempts: spec.max_rejects + 1, symmetric, ill_conditioned, numerical })
}

/// `count` accepted matrices; entry `k` is drawn from `seed::split(spec.seed, k)`.
pub fn generate_corpus(spec: &GenSpec, count: usize, exec: &Exec) -> Result<Vec<GeneratedMatrix>> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::param("corpus size must be at least 1"));
    }
    exec.try_map(count, |k| {
        random_banded(&spec.with_seed(seed::split(spec.seed, k as u64))).map(|g| GeneratedMatrix { index: k, ..g })
    })
}
