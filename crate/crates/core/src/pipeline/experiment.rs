//! The end-to-end protocol: corpora, labels, training, calibration and the
//! held-out benchmark.
//!
//! Exact label fields are the expensive part, so they can be cached in a
//! directory. A cache file is keyed by a hash of everything that determines
//! its contents and is ignored when the key does not match.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{ComplexGrid, SigmaField};
use crate::matrix_gen::{generate_corpus, GenSpec, GeneratedMatrix};
use crate::neural::{train, EpochRecord, ModelBundle, TrainConfig};
use crate::pipeline::benchmark::{benchmark, BenchmarkOptions, BenchmarkRecord};
use crate::pipeline::calibrate::{calibrate_with_fields, CalibrationReport};
use crate::pipeline::dataset::{build_dataset_from_fields, label_fields, SampleCounts};
use crate::seed::{self, stream};

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    /// Seeds the three corpora and the sampling of negatives.
    pub data_seed: u64,
    pub n: usize,
    pub bandwidths: Vec<usize>,
    pub train_count: usize,
    pub val_count: usize,
    pub test_count: usize,
    pub grid: ComplexGrid,
    pub eps: f64,
    pub train: TrainConfig,
    pub random_baseline: bool,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data_seed: 0,
            n: 64,
            bandwidths: vec![1, 2, 3, 4],
            train_count: 500,
            val_count: 30,
            test_count: 50,
            grid: ComplexGrid::standard(),
            eps: 0.01,
            train: TrainConfig::default(),
            random_baseline: true,
            cache_dir: None,
        }
    }
}

impl ExperimentConfig {
    fn spec(&self, tag: u64) -> GenSpec {
        GenSpec { n: self.n, bandwidths: self.bandwidths.clone(), seed: seed::split(self.data_seed, tag), ..GenSpec::default() }
    }

    pub fn train_spec(&self) -> GenSpec {
        self.spec(stream::TRAIN_CORPUS)
    }

    pub fn val_spec(&self) -> GenSpec {
        self.spec(stream::VALIDATION_CORPUS)
    }

    pub fn test_spec(&self) -> GenSpec {
        self.spec(stream::TEST_CORPUS)
    }
}

/// Matrices of the three disjoint corpora.
pub struct Corpora {
    pub train: Vec<GeneratedMatrix>,
    pub val: Vec<GeneratedMatrix>,
    pub test: Vec<GeneratedMatrix>,
}

pub fn build_corpora(config: &ExperimentConfig, exec: &Exec) -> Result<Corpora> {
    Ok(Corpora {
        train: generate_corpus(&config.train_spec(), config.train_count, exec)?,
        val: generate_corpus(&config.val_spec(), config.val_count, exec)?,
        test: generate_corpus(&config.test_spec(), config.test_count, exec)?,
    })
}

fn cache_key(corpus: &[GeneratedMatrix], grid: &ComplexGrid) -> u64 {
    let mut h = seed::mix64(corpus.len() as u64);
    for g in corpus {
        h = seed::mix64(h ^ g.matrix.fingerprint());
    }
    for v in [grid.x_min, grid.x_max, grid.y_min, grid.y_max] {
        h = seed::mix64(h ^ v.to_bits());
    }
    seed::mix64(h ^ ((grid.nx as u64) << 32 | grid.ny as u64))
}

fn read_cache(path: &Path, key: u64, corpus: usize, grid: &ComplexGrid) -> Option<Vec<SigmaField>> {
    let bytes = std::fs::read(path).ok()?;
    let per = grid.len() * 8;
    if bytes.len() != 8 + corpus * per || bytes[..8] != key.to_le_bytes() {
        return None;
    }
    bytes[8..]
        .chunks_exact(per)
        .map(|c| {
            let v = c.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
            SigmaField::dense(*grid, v).ok()
        })
        .collect()
}

fn write_cache(path: &Path, key: u64, fields: &[SigmaField]) -> Result<()> {
    let mut bytes = key.to_le_bytes().to_vec();
    for f in fields {
        for v in f.values() {
            bytes.extend_from_slice(&v.expect("label fields are dense").to_le_bytes());
        }
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Exact fields of `corpus`, read from `cache_dir/<name>.bin` when present.
pub fn cached_fields(
    corpus: &[GeneratedMatrix],
    grid: &ComplexGrid,
    cache_dir: Option<&Path>,
    name: &str,
    exec: &Exec,
) -> Result<Vec<SigmaField>> {
    let key = cache_key(corpus, grid);
    let path = cache_dir.map(|d| d.join(format!("{name}.bin")));
    if let Some(p) = &path {
        if let Some(f) = read_cache(p, key, corpus.len(), grid) {
            log::info!("loaded {} cached fields from {}", f.len(), p.display());
            return Ok(f);
        }
    }
    log::info!("computing exact fields for {} matrices ({name})", corpus.len());
    let fields = label_fields(corpus, grid, exec)?;
    if let Some(p) = &path {
        if let Some(d) = p.parent() {
            std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        write_cache(p, key, &fields)?;
    }
    Ok(fields)
}

pub struct ExperimentOutcome {
    pub sample_count: usize,
    pub positive_count: usize,
    pub counts: Vec<SampleCounts>,
    pub bundle: ModelBundle,
    pub history: Vec<EpochRecord>,
    pub calibration: CalibrationReport,
    /// Empty when calibration failed.
    pub records: Vec<BenchmarkRecord>,
}

/// Runs the protocol. Timing-sensitive stages run on `exec`; use a serial
/// executor to reproduce single-thread timings.
pub fn run_experiment(config: &ExperimentConfig, exec: &Exec) -> Result<ExperimentOutcome> {
    run_experiment_on(config, &build_corpora(config, exec)?, exec)
}

/// [`run_experiment`] on corpora that were already generated from `config`.
pub fn run_experiment_on(config: &ExperimentConfig, corpora: &Corpora, exec: &Exec) -> Result<ExperimentOutcome> {
    let cache = config.cache_dir.as_deref();
    let train_fields = cached_fields(&corpora.train, &config.grid, cache, "train_fields", exec)?;
    let dataset = build_dataset_from_fields(&corpora.train, &train_fields, config.eps, config.data_seed, exec)?;
    drop(train_fields);
    log::info!("{} labeled samples ({} sensitive)", dataset.len(), dataset.samples.positives());

    let trained = train(&dataset.samples, &config.train)?;
    let mut bundle = trained.bundle;

    let val_fields = cached_fields(&corpora.val, &config.grid, cache, "val_fields", exec)?;
    let calibration = calibrate_with_fields(&bundle, &corpora.val, &val_fields, config.eps, exec)?;
    let records = if calibration.apply(&mut bundle).is_ok() {
        let options = BenchmarkOptions { random_baseline: config.random_baseline, seed: config.data_seed };
        benchmark(&bundle, &corpora.test, &config.grid, config.eps, &options, exec)?
    } else {
        log::warn!("calibration failed; skipping the benchmark");
        Vec::new()
    };
    Ok(ExperimentOutcome {
        sample_count: dataset.len(),
        positive_count: dataset.samples.positives(),
        counts: dataset.counts,
        bundle,
        history: trained.history,
        calibration,
        records,
    })
}
