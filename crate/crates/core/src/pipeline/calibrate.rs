//! Decision-threshold calibration on held-out matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{dilate, full_pseudospectrum, sensitive_zone, BinaryMask, ComplexGrid, SigmaField};
use crate::matrix_gen::GeneratedMatrix;
use crate::neural::ModelBundle;
use crate::pipeline::metrics::{recall_against, TRUTH_DILATION};
use crate::pipeline::predict::{predict_map, predicted_region, quantile, ProbabilityField};

pub const MEDIAN_TARGET: f64 = 0.90;
pub const P10_TARGET: f64 = 0.75;

/// Candidate thresholds 0.05, 0.06, ..., 0.94.
pub fn candidate_taus() -> Vec<f64> {
    (5..=94).map(|k| k as f64 / 100.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauRow {
    pub tau: f64,
    pub median_recall: f64,
    pub p10_recall: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub rows: Vec<TauRow>,
    pub tau_star: Option<f64>,
    pub matrices: usize,
}

impl CalibrationReport {
    pub fn passed(&self) -> bool {
        self.tau_star.is_some()
    }

    pub fn selected(&self) -> Option<&TauRow> {
        let t = self.tau_star?;
        self.rows.iter().find(|r| r.tau == t)
    }

    /// Writes `tau_star` and its recall statistics into `bundle`, or returns
    /// [`Error::Calibration`] when no candidate passed.
    pub fn apply(&self, bundle: &mut ModelBundle) -> Result<()> {
        let row = self.selected().ok_or(Error::Calibration)?;
        bundle.tau_star = Some(row.tau);
        bundle.calibration_recall = Some((row.median_recall, row.p10_recall));
        Ok(())
    }

    /// CSV with header `tau,median_recall,p10_recall,passes,selected`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,median_recall,p10_recall,passes,selected\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:.2},{:?},{:?},{},{}\n",
                r.tau,
                r.median_recall,
                r.p10_recall,
                r.passes as u8,
                (Some(r.tau) == self.tau_star) as u8
            ));
        }
        s
    }
}

/// Sweeps the candidate thresholds over precomputed probability fields.
/// `dilated_truths[m]` is the true sensitive zone of matrix `m` dilated by 3x3.
pub fn calibrate_from_fields(probs: &[ProbabilityField], dilated_truths: &[BinaryMask]) -> Result<CalibrationReport> {
    if probs.is_empty() {
        return Err(Error::param("calibration needs at least one validation matrix"));
    }
    if probs.len() != dilated_truths.len() {
        return Err(Error::param("one truth mask per probability field is required"));
    }
    let mut rows = Vec::new();
    for tau in candidate_taus() {
        let recalls = probs
            .iter()
            .zip(dilated_truths)
            .map(|(p, t)| predicted_region(p, tau).map(|r| recall_against(&r, t)))
            .collect::<Result<Vec<f64>>>()?;
        let median_recall = quantile(&recalls, 0.5);
        let p10_recall = quantile(&recalls, 0.1);
        let passes = median_recall >= MEDIAN_TARGET && p10_recall >= P10_TARGET;
        rows.push(TauRow { tau, median_recall, p10_recall, passes });
    }
    let tau_star = rows.iter().find(|r| r.passes).map(|r| r.tau);
    Ok(CalibrationReport { rows, tau_star, matrices: probs.len() })
}

/// Calibration using already computed exact fields of the validation matrices.
pub fn calibrate_with_fields(
    bundle: &ModelBundle,
    val_corpus: &[GeneratedMatrix],
    fields: &[SigmaField],
    eps: f64,
    exec: &Exec,
) -> Result<CalibrationReport> {
    if val_corpus.len() != fields.len() {
        return Err(Error::param("one field per validation matrix is required"));
    }
    let pairs = exec.try_map(val_corpus.len(), |m| -> Result<_> {
        let g = &val_corpus[m];
        let grid = fields[m].grid();
        let p = predict_map(bundle, &g.matrix, grid)?;
        let truth = dilate(&sensitive_zone(&fields[m], eps), TRUTH_DILATION)?;
        Ok((p, truth))
    })?;
    let (probs, truths): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    calibrate_from_fields(&probs, &truths)
}

/// Smallest candidate threshold whose validation recall has median >= 0.90
/// and 10th percentile >= 0.75. Recall compares the dense predicted region
/// with the 3x3-dilated exact sensitive zone.
pub fn calibrate_threshold(
    bundle: &ModelBundle,
    val_corpus: &[GeneratedMatrix],
    grid: &ComplexGrid,
    eps: f64,
    exec: &Exec,
) -> Result<CalibrationReport> {
    let fields = val_corpus
        .iter()
        .map(|g| full_pseudospectrum(&g.matrix, grid, exec))
        .collect::<Result<Vec<_>>>()?;
    calibrate_with_fields(bundle, val_corpus, &fields, eps, exec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ninety_candidates() {
        let t = candidate_taus();
        assert_eq!(t.len(), 90);
        assert_eq!(t[0], 0.05);
        assert_eq!(t[89], 0.94);
    }

    #[test]
    fn oracle_and_null_predictors() {
        let grid = ComplexGrid::new(-1.0, 1.0, -1.0, 1.0, 12, 12).unwrap();
        let truth = BinaryMask::from_fn(12, 12, |i, j| i == 5 && (3..8).contains(&j));
        let dil = dilate(&truth, 3).unwrap();
        let oracle = ProbabilityField { grid, values: truth.bits().iter().map(|&b| b as u8 as f64).collect() };
        let r = calibrate_from_fields(&[oracle.clone(), oracle], &[dil.clone(), dil.clone()]).unwrap();
        assert_eq!(r.tau_star, Some(0.05));
        assert_eq!(r.selected().unwrap().median_recall, 1.0);

        let null = ProbabilityField { grid, values: vec![0.0; 144] };
        let r = calibrate_from_fields(&[null], &[dil]).unwrap();
        assert!(!r.passed());
        assert_eq!(r.rows.len(), 90);
    }
}
