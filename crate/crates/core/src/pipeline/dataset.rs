//! Balanced training samples from exact sensitivity labels.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::{global_features, FeatureVector};
use crate::linalg::{full_pseudospectrum, sensitive_zone, ComplexGrid, SigmaField};
use crate::matrix_gen::GeneratedMatrix;
use crate::neural::TrainingSet;
use crate::seed::{self, stream};
use crate::Complex64;

/// Negatives kept per matrix when it has `positives` sensitive points.
pub fn negative_quota(positives: usize) -> usize {
    (10 * positives).max(200)
}

/// One labeled grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub matrix_id: usize,
    pub z: Complex64,
    pub features: FeatureVector,
    pub label: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleCounts {
    pub matrix_id: usize,
    pub positives: usize,
    pub negatives: usize,
    pub available_negatives: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub samples: TrainingSet,
    pub counts: Vec<SampleCounts>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample(&self, k: usize) -> LabeledSample {
        let s = &self.samples;
        LabeledSample {
            matrix_id: s.matrix_ids[k],
            z: Complex64::new(s.coords[k][0], s.coords[k][1]),
            features: FeatureVector(s.features[k]),
            label: s.labels[k] >= 0.5,
        }
    }
}

/// Exact fields for every corpus matrix.
pub fn label_fields(corpus: &[GeneratedMatrix], grid: &ComplexGrid, exec: &Exec) -> Result<Vec<SigmaField>> {
    corpus.iter().map(|g| full_pseudospectrum(&g.matrix, grid, exec)).collect()
}

/// Builds the dataset, computing the exact fields first.
pub fn build_dataset(
    corpus: &[GeneratedMatrix],
    grid: &ComplexGrid,
    eps: f64,
    seed: u64,
    exec: &Exec,
) -> Result<Dataset> {
    let fields = label_fields(corpus, grid, exec)?;
    build_dataset_from_fields(corpus, &fields, eps, seed, exec)
}

/// Per matrix: every sensitive point, plus `max(10 n_pos, 200)` non-sensitive
/// points drawn without replacement (capped at what is available). Matrix `k`
/// samples with seed `split(split(seed, SAMPLING), index_k)`.
pub fn build_dataset_from_fields(
    corpus: &[GeneratedMatrix],
    fields: &[SigmaField],
    eps: f64,
    seed: u64,
    exec: &Exec,
) -> Result<Dataset> {
    if corpus.is_empty() {
        return Err(Error::param("dataset corpus is empty"));
    }
    if corpus.len() != fields.len() {
        return Err(Error::param(format!("{} matrices but {} fields", corpus.len(), fields.len())));
    }
    if !(eps > 0.0) {
        return Err(Error::param(format!("eps must be positive, got {eps}")));
    }
    let base = seed::split(seed, stream::SAMPLING);
    let parts = exec.try_map(corpus.len(), |m| -> Result<_> {
        let g = &corpus[m];
        let field = &fields[m];
        let grid = field.grid();
        let mask = sensitive_zone(field, eps);
        let positives: Vec<usize> = (0..grid.len()).filter(|&k| mask.bits()[k]).collect();
        let negatives: Vec<usize> = (0..grid.len()).filter(|&k| !mask.bits()[k]).collect();
        let quota = negative_quota(positives.len()).min(negatives.len());
        let mut rng = seed::rng(seed::split(base, g.index as u64));
        let mut picked: Vec<usize> = index::sample(&mut rng, negatives.len(), quota).into_iter().map(|i| negatives[i]).collect();
        picked.sort_unstable();

        let gf = global_features(&g.matrix, g.matrix.fingerprint())?;
        let mut rows = Vec::with_capacity(positives.len() + picked.len());
        for (&k, label) in positives.iter().map(|k| (k, 1.0)).chain(picked.iter().map(|k| (k, 0.0))) {
            let z = grid.point_at(k);
            rows.push(([z.re, z.im], gf.assemble(z).0, label));
        }
        let counts = SampleCounts {
            matrix_id: g.index,
            positives: positives.len(),
            negatives: picked.len(),
            available_negatives: negatives.len(),
        };
        Ok((rows, counts))
    })?;

    let mut out = Dataset::default();
    for ((rows, counts), g) in parts.into_iter().zip(corpus) {
        for (c, f, y) in rows {
            out.samples.push(g.index, c, f, y);
        }
        out.counts.push(counts);
    }
    Ok(out)
}
