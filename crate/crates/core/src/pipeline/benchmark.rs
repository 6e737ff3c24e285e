//! Per-matrix comparison of the hybrid solver against the full grid, with
//! aggregate tables.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::linalg::{full_pseudospectrum, ComplexGrid, SigmaField};
use crate::matrix_gen::GeneratedMatrix;
use crate::neural::ModelBundle;
use crate::pipeline::hybrid::{hybrid_pseudospectrum, HybridResult};
use crate::pipeline::metrics::{evaluate, random_baseline, EvalMetrics};
use crate::seed::{self, stream};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkRecord {
    pub matrix_id: usize,
    pub bandwidth: usize,
    pub metrics: EvalMetrics,
    pub nn_evaluations: usize,
    pub t_full: f64,
    pub t_nn: f64,
    pub t_restricted: f64,
    pub t_hybrid: f64,
    pub speedup_actual: f64,
    pub speedup_best: f64,
    pub mae_log10_smin: f64,
    /// Uniform sampling of the same number of points, when requested.
    pub baseline: Option<EvalMetrics>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BenchmarkOptions {
    pub random_baseline: bool,
    pub seed: u64,
}

/// Mean `|log10 a - log10 b|` over points evaluated in both fields; points
/// with identical values contribute zero (so exact zeros do not produce NaN).
pub fn log_mae(restricted: &SigmaField, full: &SigmaField) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (r, f) in restricted.values().iter().zip(full.values()) {
        if let (Some(r), Some(f)) = (r, f) {
            count += 1;
            if r != f {
                total += (r.log10() - f.log10()).abs();
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Builds the record for one matrix from its timed full field and hybrid run.
pub fn record_for(
    g: &GeneratedMatrix,
    full: &SigmaField,
    t_full: f64,
    hybrid: &HybridResult,
    eps: f64,
    options: &BenchmarkOptions,
) -> Result<BenchmarkRecord> {
    let fraction = hybrid.grid_fraction();
    let metrics = evaluate(&hybrid.region, full, eps, fraction)?;
    let baseline = if options.random_baseline && fraction > 0.0 {
        let s = seed::split(seed::split(options.seed, stream::BASELINE), g.index as u64);
        Some(random_baseline(full, eps, fraction, s)?)
    } else {
        None
    };
    Ok(BenchmarkRecord {
        matrix_id: g.index,
        bandwidth: g.bandwidth,
        metrics,
        nn_evaluations: hybrid.nn_evaluations,
        t_full,
        t_nn: hybrid.t_nn,
        t_restricted: hybrid.t_restricted,
        t_hybrid: hybrid.t_hybrid(),
        speedup_actual: t_full / hybrid.t_hybrid(),
        speedup_best: t_full / hybrid.t_restricted,
        mae_log10_smin: log_mae(&hybrid.field, full),
        baseline,
    })
}

/// Runs the full and hybrid solvers on every test matrix, one matrix at a
/// time so timings are not skewed by concurrent work. `exec` parallelizes
/// grid points within a solve; pass [`Exec::serial`] for single-thread timing.
pub fn benchmark(
    bundle: &ModelBundle,
    test_corpus: &[GeneratedMatrix],
    grid: &ComplexGrid,
    eps: f64,
    options: &BenchmarkOptions,
    exec: &Exec,
) -> Result<Vec<BenchmarkRecord>> {
    let mut out = Vec::with_capacity(test_corpus.len());
    for g in test_corpus {
        let start = Instant::now();
        let full = full_pseudospectrum(&g.matrix, grid, exec)?;
        let t_full = start.elapsed().as_secs_f64();
        let hybrid = hybrid_pseudospectrum(bundle, &g.matrix, grid, eps, exec)?;
        let r = record_for(g, &full, t_full, &hybrid, eps, options)?;
        if r.speedup_actual < 1.0 {
            log::warn!("matrix {}: hybrid slower than full grid (speedup {:.2})", g.index, r.speedup_actual);
        }
        log::info!(
            "matrix {} (bandwidth {}): recall {:.3}, coverage {:.3}, fraction {:.3}, speedup {:.2}",
            g.index,
            g.bandwidth,
            r.metrics.recall,
            r.metrics.coverage,
            r.metrics.grid_fraction,
            r.speedup_actual
        );
        out.push(r);
    }
    Ok(out)
}

/// Summary statistics of one column (population standard deviation).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        if values.is_empty() {
            return Summary { mean: f64::NAN, std: f64::NAN, median: f64::NAN, min: f64::NAN, max: f64::NAN };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        Summary {
            mean,
            std,
            median: crate::pipeline::predict::quantile(values, 0.5),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

type Column = (&'static str, fn(&BenchmarkRecord) -> f64);

const COLUMNS: [Column; 12] = [
    ("accuracy", |r| r.metrics.accuracy),
    ("precision", |r| r.metrics.precision),
    ("recall", |r| r.metrics.recall),
    ("coverage", |r| r.metrics.coverage),
    ("grid_fraction", |r| r.metrics.grid_fraction),
    ("t_full", |r| r.t_full),
    ("t_nn", |r| r.t_nn),
    ("t_restricted", |r| r.t_restricted),
    ("t_hybrid", |r| r.t_hybrid),
    ("speedup_actual", |r| r.speedup_actual),
    ("speedup_best", |r| r.speedup_best),
    ("mae_log10_smin", |r| r.mae_log10_smin),
];

pub fn summarize(records: &[BenchmarkRecord], metric: &str) -> Option<Summary> {
    let (_, f) = COLUMNS.iter().find(|(name, _)| *name == metric)?;
    Some(Summary::of(&records.iter().map(f).collect::<Vec<_>>()))
}

/// One JSON object per line.
pub fn records_jsonl(records: &[BenchmarkRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("record serialization cannot fail"));
        s.push('\n');
    }
    s
}

/// `metric,mean,std,median,min,max`, one row per column.
pub fn aggregate_csv(records: &[BenchmarkRecord]) -> String {
    let mut s = String::from("metric,mean,std,median,min,max\n");
    for (name, f) in COLUMNS.iter() {
        let m = Summary::of(&records.iter().map(f).collect::<Vec<_>>());
        s.push_str(&format!("{name},{:?},{:?},{:?},{:?},{:?}\n", m.mean, m.std, m.median, m.min, m.max));
    }
    s
}

/// Per-bandwidth means.
pub fn strata_csv(records: &[BenchmarkRecord]) -> String {
    let mut bands: Vec<usize> = records.iter().map(|r| r.bandwidth).collect();
    bands.sort_unstable();
    bands.dedup();
    let mut s = String::from(
        "bandwidth,count,recall_mean,recall_std,coverage_mean,precision_mean,grid_fraction_mean,speedup_actual_mean\n",
    );
    for b in bands {
        let rs: Vec<&BenchmarkRecord> = records.iter().filter(|r| r.bandwidth == b).collect();
        let col = |f: &dyn Fn(&BenchmarkRecord) -> f64| Summary::of(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
        let recall = col(&|r| r.metrics.recall);
        s.push_str(&format!(
            "{b},{},{:?},{:?},{:?},{:?},{:?},{:?}\n",
            rs.len(),
            recall.mean,
            recall.std,
            col(&|r| r.metrics.coverage).mean,
            col(&|r| r.metrics.precision).mean,
            col(&|r| r.metrics.grid_fraction).mean,
            col(&|r| r.speedup_actual).mean,
        ));
    }
    s
}

/// Hybrid versus uniform sampling at the same grid fraction. Empty when no
/// record carries a baseline.
pub fn comparison_csv(records: &[BenchmarkRecord]) -> String {
    let with: Vec<&BenchmarkRecord> = records.iter().filter(|r| r.baseline.is_some()).collect();
    let mut s = String::from(
        "method,matrices,grid_fraction_mean,recall_mean,recall_std,coverage_mean,coverage_std,precision_mean\n",
    );
    if with.is_empty() {
        return s;
    }
    let rows: [(&str, Vec<EvalMetrics>); 2] = [
        ("hybrid", with.iter().map(|r| r.metrics).collect()),
        ("random", with.iter().map(|r| r.baseline.unwrap()).collect()),
    ];
    for (name, ms) in rows {
        let sum = |f: fn(&EvalMetrics) -> f64| Summary::of(&ms.iter().map(f).collect::<Vec<_>>());
        let recall = sum(|m| m.recall);
        let coverage = sum(|m| m.coverage);
        s.push_str(&format!(
            "{name},{},{:?},{:?},{:?},{:?},{:?},{:?}\n",
            ms.len(),
            sum(|m| m.grid_fraction).mean,
            recall.mean,
            recall.std,
            coverage.mean,
            coverage.std,
            sum(|m| m.precision).mean
        ));
    }
    s
}
