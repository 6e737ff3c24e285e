//! Model files.
//!
//! A model is one JSON document with four sections:
//!
//! ```text
//! {
//!   "format": "pseudospectra-model/1",
//!   "meta":         { "seed", "epochs_run", "best_epoch", "best_val_loss",
//!                     "train_samples", "val_samples", "param_count" },
//!   "feature_norm": { "shape": [33], "mean": [...], "std": [...] },
//!   "params":       [ { "name": "coord_1.weight", "shape": [64, 26], "values": [...] },
//!                     { "name": "coord_1.bias",   "shape": [64],     "values": [...] }, ... ],
//!   "calibration":  { "tau_star": 0.05 | null, "median_recall": ..., "p10_recall": ... }
//! }
//! ```
//!
//! Weights are row-major `out x in`. Numbers are written with shortest
//! round-trip precision, so save/load/save is byte-stable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, NUM_FEATURES};
use crate::neural::network::{ModelParams, LAYERS, PARAM_COUNT};

pub const FORMAT: &str = "pseudospectra-model/1";

/// Smallest standard deviation used when z-scoring a feature.
pub const STD_FLOOR: f64 = 1e-6;

/// Per-feature z-score statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureNorm {
    pub mean: [f64; NUM_FEATURES],
    pub std: [f64; NUM_FEATURES],
}

impl FeatureNorm {
    pub fn identity() -> Self {
        FeatureNorm { mean: [0.0; NUM_FEATURES], std: [1.0; NUM_FEATURES] }
    }

    /// Population statistics over `rows`, with `std` floored at [`STD_FLOOR`].
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64; NUM_FEATURES]>) -> Result<Self> {
        let mut count = 0usize;
        let mut sum = [0.0; NUM_FEATURES];
        let mut rows_vec = Vec::new();
        for r in rows {
            count += 1;
            for (s, v) in sum.iter_mut().zip(r) {
                *s += v;
            }
            rows_vec.push(r);
        }
        if count == 0 {
            return Err(Error::param("cannot fit feature statistics on zero rows"));
        }
        let mean = sum.map(|s| s / count as f64);
        let mut var = [0.0; NUM_FEATURES];
        for r in rows_vec {
            for k in 0..NUM_FEATURES {
                let d = r[k] - mean[k];
                var[k] += d * d;
            }
        }
        let std = var.map(|v| (v / count as f64).sqrt().max(STD_FLOOR));
        Ok(FeatureNorm { mean, std })
    }

    pub fn apply(&self, raw: &[f64; NUM_FEATURES]) -> [f64; NUM_FEATURES] {
        std::array::from_fn(|k| (raw[k] - self.mean[k]) / self.std[k])
    }

    pub fn apply_vector(&self, raw: &FeatureVector) -> [f64; NUM_FEATURES] {
        self.apply(&raw.0)
    }
}

/// Provenance of a trained model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub train_samples: usize,
    pub val_samples: usize,
}

/// Network parameters plus everything needed to apply them.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelBundle {
    pub params: ModelParams,
    pub norm: FeatureNorm,
    pub tau_star: Option<f64>,
    /// Median and 10th-percentile validation recall at `tau_star`.
    pub calibration_recall: Option<(f64, f64)>,
    pub meta: TrainingMeta,
}

impl ModelBundle {
    pub fn new(params: ModelParams, norm: FeatureNorm, meta: TrainingMeta) -> Self {
        ModelBundle { params, norm, tau_star: None, calibration_recall: None, meta }
    }

    pub fn is_calibrated(&self) -> bool {
        self.tau_star.is_some()
    }

    pub fn to_json(&self) -> String {
        let params = LAYERS
            .iter()
            .enumerate()
            .flat_map(|(k, l)| {
                [
                    ArrayOut { name: format!("{}.weight", l.name), shape: vec![l.out, l.inp], values: self.params.weight(k) },
                    ArrayOut { name: format!("{}.bias", l.name), shape: vec![l.out], values: self.params.bias(k) },
                ]
            })
            .collect();
        let doc = DocOut {
            format: FORMAT,
            meta: MetaOut { param_count: PARAM_COUNT, meta: &self.meta },
            feature_norm: NormOut { shape: [NUM_FEATURES], mean: &self.norm.mean, std: &self.norm.std },
            params,
            calibration: CalibrationOut {
                tau_star: self.tau_star,
                median_recall: self.calibration_recall.map(|r| r.0),
                p10_recall: self.calibration_recall.map(|r| r.1),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("model serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |field: &str, reason: String| Error::load(format!("model field `{field}`"), reason);
        let doc: DocIn = serde_json::from_str(text).map_err(|e| Error::load("model file", e.to_string()))?;
        match doc.format.as_deref() {
            Some(FORMAT) => {}
            Some(other) => return Err(bad("format", format!("unsupported format {other:?}"))),
            None => return Err(bad("format", "missing".into())),
        }
        let meta = doc.meta.ok_or_else(|| bad("meta", "missing".into()))?;
        let norm = doc.feature_norm.ok_or_else(|| bad("feature_norm", "missing".into()))?;
        let mean = fixed_array(norm.mean, "feature_norm.mean")?;
        let std = fixed_array(norm.std, "feature_norm.std")?;
        if let Some(k) = std.iter().position(|s| !(*s > 0.0)) {
            return Err(bad("feature_norm.std", format!("entry {k} is not positive")));
        }

        let arrays = doc.params.ok_or_else(|| bad("params", "missing".into()))?;
        let mut flat = Vec::with_capacity(PARAM_COUNT);
        let mut arrays = arrays.into_iter();
        for l in LAYERS.iter() {
            for (suffix, shape) in [("weight", vec![l.out, l.inp]), ("bias", vec![l.out])] {
                let name = format!("{}.{suffix}", l.name);
                let field = format!("params.{name}");
                let a = arrays.next().ok_or_else(|| bad(&field, "missing".into()))?;
                if a.name.as_deref() != Some(name.as_str()) {
                    return Err(bad(&field, format!("found array named {:?} in its place", a.name)));
                }
                if a.shape.as_deref() != Some(shape.as_slice()) {
                    return Err(bad(&field, format!("expected shape {shape:?}, got {:?}", a.shape)));
                }
                let values = a.values.ok_or_else(|| bad(&field, "missing values".into()))?;
                let expected: usize = shape.iter().product();
                if values.len() != expected {
                    return Err(bad(&field, format!("expected {expected} values, got {}", values.len())));
                }
                flat.extend(values);
            }
        }
        if arrays.next().is_some() {
            return Err(bad("params", format!("more than {} arrays", 2 * LAYERS.len())));
        }
        let params = ModelParams::from_flat(flat).map_err(|e| bad("params", e.to_string()))?;

        let cal = doc.calibration.ok_or_else(|| bad("calibration", "missing".into()))?;
        if let Some(t) = cal.tau_star {
            if !(t > 0.0 && t < 1.0) {
                return Err(bad("calibration.tau_star", format!("{t} is outside (0, 1)")));
            }
        }
        let calibration_recall = match (cal.median_recall, cal.p10_recall) {
            (Some(m), Some(p)) => Some((m, p)),
            _ => None,
        };
        Ok(ModelBundle {
            params,
            norm: FeatureNorm { mean, std },
            tau_star: cal.tau_star,
            calibration_recall,
            meta: TrainingMeta {
                seed: meta.seed,
                epochs_run: meta.epochs_run,
                best_epoch: meta.best_epoch,
                best_val_loss: meta.best_val_loss,
                train_samples: meta.train_samples,
                val_samples: meta.val_samples,
            },
        })
    }
}

fn fixed_array(values: Option<Vec<f64>>, field: &str) -> Result<[f64; NUM_FEATURES]> {
    let v = values.ok_or_else(|| Error::load(format!("model field `{field}`"), "missing"))?;
    let n = v.len();
    v.try_into().map_err(|_| {
        Error::load(format!("model field `{field}`"), format!("expected {NUM_FEATURES} values, got {n}"))
    })
}

pub fn save_model(bundle: &ModelBundle, path: &Path) -> Result<()> {
    std::fs::write(path, bundle.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelBundle::from_json(&text)
}

#[derive(Serialize)]
struct DocOut<'a> {
    format: &'static str,
    meta: MetaOut<'a>,
    feature_norm: NormOut<'a>,
    params: Vec<ArrayOut<'a>>,
    calibration: CalibrationOut,
}

#[derive(Serialize)]
struct MetaOut<'a> {
    param_count: usize,
    #[serde(flatten)]
    meta: &'a TrainingMeta,
}

#[derive(Serialize)]
struct NormOut<'a> {
    shape: [usize; 1],
    mean: &'a [f64],
    std: &'a [f64],
}

#[derive(Serialize)]
struct ArrayOut<'a> {
    name: String,
    shape: Vec<usize>,
    values: &'a [f64],
}

#[derive(Serialize, Deserialize)]
struct CalibrationOut {
    tau_star: Option<f64>,
    median_recall: Option<f64>,
    p10_recall: Option<f64>,
}

#[derive(Deserialize)]
struct DocIn {
    format: Option<String>,
    meta: Option<TrainingMeta>,
    feature_norm: Option<NormIn>,
    params: Option<Vec<ArrayIn>>,
    calibration: Option<CalibrationOut>,
}

#[derive(Deserialize)]
struct NormIn {
    mean: Option<Vec<f64>>,
    std: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct ArrayIn {
    name: Option<String>,
    shape: Option<Vec<usize>>,
    values: Option<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn sample() -> ModelBundle {
        let mut rng = seed::rng(9);
        let mut b = ModelBundle::new(
            ModelParams::init(&mut rng),
            FeatureNorm { mean: std::array::from_fn(|k| k as f64 * 0.1), std: [0.3; NUM_FEATURES] },
            TrainingMeta { seed: 9, epochs_run: 3, best_epoch: 2, best_val_loss: 0.123456789, ..Default::default() },
        );
        b.tau_star = Some(0.05);
        b.calibration_recall = Some((1.0, 0.9));
        b
    }

    #[test]
    fn round_trip_is_exact() {
        let b = sample();
        let text = b.to_json();
        let back = ModelBundle::from_json(&text).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn missing_std_is_reported() {
        let text = sample().to_json();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["feature_norm"].as_object_mut().unwrap().remove("std");
        let err = ModelBundle::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("feature_norm.std"), "{err}");
    }

    #[test]
    fn truncated_array_reports_counts() {
        let text = sample().to_json();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["params"][2]["values"].as_array_mut().unwrap().truncate(100);
        let err = ModelBundle::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("coord_2.weight") && err.contains("4096") && err.contains("100"), "{err}");
    }

    #[test]
    fn fit_floors_constant_features() {
        let rows = [[1.0; NUM_FEATURES], [1.0; NUM_FEATURES]];
        let n = FeatureNorm::fit(rows.iter()).unwrap();
        assert_eq!(n.std, [STD_FLOOR; NUM_FEATURES]);
        assert_eq!(n.mean, [1.0; NUM_FEATURES]);
    }
}
