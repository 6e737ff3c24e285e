//! Matrix descriptors and per-point eigenvalue-distance features.
//!
//! The 30 global features, in order:
//!
//! | index | feature |
//! |---|---|
//! | f1-f4 | mean, std, min, max of Re(lambda) |
//! | f5-f8 | mean, std, min, max of Im(lambda) |
//! | f9, f10 | max and min of abs(lambda) |
//! | f11, f12 | `‖A - A^T‖_F / ‖A‖_F`, `‖A - A^H‖_F / ‖A‖_F` |
//! | f13 | `log10(kappa(A) + 1e-12)` |
//! | f14-f16 | `‖A‖_2`, `‖A‖_1`, `‖A‖_inf`, each over `‖A‖_F` |
//! | f17, f18 | mean, std of abs(diag(A)) |
//! | f19, f20 | mean, std of abs(A - diag(diag(A))) over all n^2 entries |
//! | f21 | fraction of entries with abs > 1e-10 |
//! | f22, f23 | mean, std of the squared entries of `A / (‖A‖_F + 1e-12)` |
//! | f24 | `log10(kappa(V) + 1e-12)`, V the unit-column eigenvector matrix |
//! | f25 | `log10(‖A - A^H‖_F / ‖A‖_F + 1e-12)` |
//! | f26 | `(sigma_1 - sigma_n) / (sigma_1 + 1e-12)` |
//! | f27 | `(max abs(lambda) - min abs(lambda)) / (max abs(lambda) + 1e-12)` |
//! | f28-f30 | `log10 ‖x‖/‖b‖` for `(z_d I - A) x = b`, `z_d = mean(lambda) + d`, d = 0.5, 1, 2 |
//!
//! Every `‖A‖_F` in a denominator is regularized as `‖A‖_F + 1e-12`. Standard
//! deviations are population (divide by `n`). Logarithmic condition features
//! saturate at [`LOG_CAP`].

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::linalg::kernels::{complex_singular_values, solve_shifted};
use crate::linalg::{eigen_decomposition, singular_values, RealMatrix};
use crate::seed;

pub const NUM_GLOBAL: usize = 30;
pub const NUM_POINT: usize = 3;
pub const NUM_FEATURES: usize = NUM_GLOBAL + NUM_POINT;

/// Regularizer added inside logs and denominators.
pub const STAB: f64 = 1e-12;
/// Saturation value for log-scale condition and resolvent features.
pub const LOG_CAP: f64 = 16.0;
/// Shifts of the resolvent probes (f28, f29, f30).
pub const PROBE_SHIFTS: [f64; 3] = [0.5, 1.0, 2.0];

/// Global descriptors of one matrix, with the decompositions they came from.
#[derive(Clone, Debug)]
pub struct GlobalFeatures {
    pub values: [f64; NUM_GLOBAL],
    pub eigenvalues: Vec<Complex64>,
    pub singular_values: Vec<f64>,
    pub centroid: Complex64,
}

/// The 33-vector fed to the matrix pathway: `[f1..f30, g1, g2, g3]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector(pub [f64; NUM_FEATURES]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (sum, count) = values.clone().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    let mean = sum / count as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    (mean, var.sqrt())
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn capped_log10(x: f64) -> f64 {
    if x.is_nan() {
        LOG_CAP
    } else {
        x.log10().min(LOG_CAP)
    }
}

/// Arithmetic mean of the eigenvalues.
pub fn centroid(eigvals: &[Complex64]) -> Complex64 {
    eigvals.iter().sum::<Complex64>() / eigvals.len() as f64
}

/// Seed of the `k`-th resolvent probe for a matrix whose probe seed is `base`.
pub fn probe_seed(base: u64, k: usize) -> u64 {
    seed::split(seed::split(base, seed::stream::RESOLVENT_PROBE), k as u64)
}

fn probe_at(a: &RealMatrix, center: Complex64, delta: f64, probe_seed: u64) -> f64 {
    let mut rng = seed::rng(probe_seed);
    let b: Vec<f64> = (0..a.n()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    match solve_shifted(a, center + delta, &b) {
        Some(x) if b_norm > 0.0 => {
            let x_norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            capped_log10(x_norm / b_norm)
        }
        _ => LOG_CAP,
    }
}

/// Single-vector resolvent norm estimate `log10(‖x‖ / ‖b‖)` at
/// `z = centroid + delta`, with `b` standard normal drawn from `probe_seed`.
/// A singular shifted system saturates at [`LOG_CAP`].
pub fn resolvent_probe(a: &RealMatrix, delta: f64, probe_seed: u64) -> Result<f64> {
    let (eigvals, _) = eigen_decomposition(a)?;
    Ok(probe_at(a, centroid(&eigvals), delta, probe_seed))
}

/// Computes the 30 global features. `probe_base` seeds the resolvent probes.
pub fn global_features(a: &RealMatrix, probe_base: u64) -> Result<GlobalFeatures> {
    let n = a.n();
    let nn = (n * n) as f64;
    let (eigvals, vectors) = eigen_decomposition(a)?;
    let sv = singular_values(a)?;
    let sigma_max = sv[0];
    let sigma_min = *sv.last().unwrap();

    let fro = a.frobenius_norm();
    let denom = fro + STAB;
    let mut f = [0.0; NUM_GLOBAL];

    let (re_mean, re_std) = mean_std(eigvals.iter().map(|l| l.re));
    let (re_min, re_max) = min_max(eigvals.iter().map(|l| l.re));
    let (im_mean, im_std) = mean_std(eigvals.iter().map(|l| l.im));
    let (im_min, im_max) = min_max(eigvals.iter().map(|l| l.im));
    let (abs_min, abs_max) = min_max(eigvals.iter().map(|l| l.norm()));
    f[0..10].copy_from_slice(&[re_mean, re_std, re_min, re_max, im_mean, im_std, im_min, im_max, abs_max, abs_min]);

    let skew = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let d = a.get(i, j) - a.get(j, i);
            d * d
        })
        .sum::<f64>()
        .sqrt();
    // A is real, so A^H = A^T.
    f[10] = skew / denom;
    f[11] = skew / denom;

    let kappa = if sigma_min > 0.0 { sigma_max / sigma_min } else { f64::INFINITY };
    f[12] = capped_log10(kappa + STAB);

    let norm1 = (0..n).map(|j| (0..n).map(|i| a.get(i, j).abs()).sum::<f64>()).fold(0.0, f64::max);
    let norm_inf = (0..n).map(|i| (0..n).map(|j| a.get(i, j).abs()).sum::<f64>()).fold(0.0, f64::max);
    f[13] = sigma_max / denom;
    f[14] = norm1 / denom;
    f[15] = norm_inf / denom;

    let (diag_mean, diag_std) = mean_std((0..n).map(|i| a.get(i, i).abs()));
    let off = (0..n * n).map(|k| if k / n == k % n { 0.0 } else { a.as_slice()[k].abs() });
    let (off_mean, off_std) = mean_std(off);
    f[16] = diag_mean;
    f[17] = diag_std;
    f[18] = off_mean;
    f[19] = off_std;

    f[20] = a.as_slice().iter().filter(|v| v.abs() > 1e-10).count() as f64 / nn;
    let (sq_mean, sq_std) = mean_std(a.as_slice().iter().map(|v| (v / denom) * (v / denom)));
    f[21] = sq_mean;
    f[22] = sq_std;

    let vsv = complex_singular_values(&vectors)?;
    let v_min = *vsv.last().unwrap();
    let kappa_v = if v_min > 0.0 { vsv[0] / v_min } else { f64::INFINITY };
    f[23] = capped_log10(kappa_v + STAB);
    f[24] = (skew / denom + STAB).log10();
    f[25] = (sigma_max - sigma_min) / (sigma_max + STAB);
    f[26] = (abs_max - abs_min) / (abs_max + STAB);

    let center = centroid(&eigvals);
    for (k, delta) in PROBE_SHIFTS.iter().enumerate() {
        f[27 + k] = probe_at(a, center, *delta, probe_seed(probe_base, k));
    }

    Ok(GlobalFeatures { values: f, eigenvalues: eigvals, singular_values: sv, centroid: center })
}

fn distances(z: Complex64, eigvals: &[Complex64], center: Complex64) -> [f64; NUM_POINT] {
    let mut nearest = f64::INFINITY;
    let mut total = 0.0;
    for l in eigvals {
        let d = (z - l).norm();
        nearest = nearest.min(d);
        total += d;
    }
    [nearest, (z - center).norm(), total / eigvals.len() as f64]
}

/// `(g1, g2, g3)`: nearest-eigenvalue distance, distance to the eigenvalue
/// centroid, and mean distance to the eigenvalues.
pub fn point_features(z: Complex64, eigvals: &[Complex64]) -> [f64; NUM_POINT] {
    assert!(!eigvals.is_empty(), "point features need at least one eigenvalue");
    distances(z, eigvals, centroid(eigvals))
}

impl GlobalFeatures {
    /// Full feature vector at `z`; the global part is shared by every point.
    pub fn assemble(&self, z: Complex64) -> FeatureVector {
        let mut out = [0.0; NUM_FEATURES];
        out[..NUM_GLOBAL].copy_from_slice(&self.values);
        out[NUM_GLOBAL..].copy_from_slice(&distances(z, &self.eigenvalues, self.centroid));
        FeatureVector(out)
    }
}

/// `matrix_id,f1..f30` rows for debugging.
pub fn feature_dump_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a GlobalFeatures)>) -> String {
    let mut out = String::from("matrix_id");
    for k in 1..=NUM_GLOBAL {
        out.push_str(&format!(",f{k}"));
    }
    out.push('\n');
    for (id, g) in rows {
        out.push_str(id);
        for v in g.values {
            out.push_str(&format!(",{v:?}"));
        }
        out.push('\n');
    }
    out
}
