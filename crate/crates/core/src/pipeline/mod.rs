//! From exact labels to a calibrated hybrid solver and its benchmark.

pub mod benchmark;
pub mod calibrate;
pub mod dataset;
pub mod experiment;
pub mod hybrid;
pub mod metrics;
pub mod predict;

pub use benchmark::{aggregate_csv, benchmark, comparison_csv, records_jsonl, strata_csv, BenchmarkOptions, BenchmarkRecord, Summary};
pub use calibrate::{calibrate_from_fields, calibrate_threshold, calibrate_with_fields, candidate_taus, CalibrationReport, TauRow};
pub use dataset::{build_dataset, build_dataset_from_fields, negative_quota, Dataset, LabeledSample, SampleCounts};
pub use hybrid::{hybrid_pseudospectrum, hybrid_with_region, HybridResult, DEFAULT_STRIDE};
pub use metrics::{evaluate, random_baseline, score_masks, EvalMetrics};
pub use predict::{hierarchical_predict, predict_map, predicted_region, quantile, HierarchicalPrediction, Predictor, ProbabilityField};
