//! Region quality against exact labels, and the uniform-sampling baseline.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dilate, sensitive_zone, BinaryMask, SigmaField};
use crate::seed;

/// Side of the box applied to the true sensitive zone before measuring recall.
pub const TRUTH_DILATION: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub coverage: f64,
    pub grid_fraction: f64,
    /// Counts of the prediction against the raw (undilated) truth.
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

/// Fraction of the dilated truth covered by `pred`; 1 when the truth is empty.
pub fn recall_against(pred: &BinaryMask, dilated_truth: &BinaryMask) -> f64 {
    let t = dilated_truth.count();
    if t == 0 {
        1.0
    } else {
        pred.intersection_count(dilated_truth) as f64 / t as f64
    }
}

/// Scores `pred` against `truth`. `truth_dilated` must be `truth` dilated by
/// [`TRUTH_DILATION`].
pub fn score_masks(pred: &BinaryMask, truth: &BinaryMask, truth_dilated: &BinaryMask, grid_fraction: f64) -> EvalMetrics {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &t) in pred.bits().iter().zip(truth.bits()) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let n = pred.len() as f64;
    let n_pred = tp + fp;
    let n_true = tp + fn_;
    let precision = match (n_pred, n_true) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => tp as f64 / n_pred as f64,
    };
    let coverage = if n_true == 0 { 1.0 } else { tp as f64 / n_true as f64 };
    EvalMetrics {
        accuracy: (tp + tn) as f64 / n,
        precision,
        recall: recall_against(pred, truth_dilated),
        coverage,
        grid_fraction,
        tp,
        fp,
        fn_,
        tn,
    }
}

/// Metrics of a predicted region against the exact field.
pub fn evaluate(pred: &BinaryMask, truth_field: &SigmaField, eps: f64, grid_fraction: f64) -> Result<EvalMetrics> {
    if !pred.matches_grid(truth_field.grid()) {
        return Err(Error::param("prediction mask does not match the truth grid"));
    }
    let truth = sensitive_zone(truth_field, eps);
    let dil = dilate(&truth, TRUTH_DILATION)?;
    Ok(score_masks(pred, &truth, &dil, grid_fraction))
}

/// Evaluates `floor(fraction N)` grid points chosen uniformly without
/// replacement. The prediction is the sensitive subset of the chosen points;
/// recall is measured on the chosen points themselves, as it is for the
/// hybrid method's evaluated region.
pub fn random_baseline(truth_field: &SigmaField, eps: f64, fraction: f64, seed: u64) -> Result<EvalMetrics> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::param(format!("baseline fraction must lie in (0, 1], got {fraction}")));
    }
    let truth = sensitive_zone(truth_field, eps);
    let dil = dilate(&truth, TRUTH_DILATION)?;
    Ok(random_baseline_masks(&truth, &dil, fraction, seed))
}

pub(crate) fn random_baseline_masks(truth: &BinaryMask, dil: &BinaryMask, fraction: f64, seed: u64) -> EvalMetrics {
    let n = truth.len();
    let k = (fraction * n as f64).floor() as usize;
    let mut rng = seed::rng(seed);
    let mut selected = BinaryMask::empty(truth.ny(), truth.nx());
    for idx in index::sample(&mut rng, n, k) {
        selected.set(idx / truth.nx(), idx % truth.nx(), true);
    }
    let pred = selected.and(truth);
    EvalMetrics { recall: recall_against(&selected, dil), ..score_masks(&pred, truth, dil, k as f64 / n as f64) }
}
