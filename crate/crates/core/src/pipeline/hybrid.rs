//! Exact minimum singular values restricted to the predicted region.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{restricted_pseudospectrum, sensitive_zone, BinaryMask, ComplexGrid, RealMatrix, SigmaField};
use crate::neural::ModelBundle;
use crate::pipeline::predict::{hierarchical_predict_with, predicted_region, Predictor};

/// Coarse stride used by the hybrid solver.
pub const DEFAULT_STRIDE: usize = 4;

#[derive(Clone, Debug)]
pub struct HybridResult {
    /// Exact values inside `region`, unevaluated elsewhere.
    pub field: SigmaField,
    pub region: BinaryMask,
    /// `{z in region : sigma_min(z) <= eps}`.
    pub sensitive: BinaryMask,
    pub nn_evaluations: usize,
    /// Feature extraction, network passes, thresholding and dilation (seconds).
    pub t_nn: f64,
    /// Restricted `sigma_min` evaluations only (seconds).
    pub t_restricted: f64,
}

impl HybridResult {
    pub fn t_hybrid(&self) -> f64 {
        self.t_nn + self.t_restricted
    }

    pub fn grid_fraction(&self) -> f64 {
        self.region.fraction()
    }
}

/// Predicts a region with the calibrated threshold, then evaluates it exactly.
pub fn hybrid_pseudospectrum(
    bundle: &ModelBundle,
    a: &RealMatrix,
    grid: &ComplexGrid,
    eps: f64,
    exec: &Exec,
) -> Result<HybridResult> {
    let tau = bundle
        .tau_star
        .ok_or_else(|| Error::param("the model has no calibrated threshold; run calibration first"))?;
    grid.validate()?;
    let start = Instant::now();
    let predictor = Predictor::new(bundle, a)?;
    let h = hierarchical_predict_with(&predictor, grid, DEFAULT_STRIDE)?;
    let region = predicted_region(&h.field, tau)?;
    let t_nn = start.elapsed().as_secs_f64();
    let mut out = hybrid_with_region(a, grid, eps, region, exec)?;
    out.t_nn = t_nn;
    out.nn_evaluations = h.evaluations;
    Ok(out)
}

/// The exact stage alone, on a caller-supplied region.
pub fn hybrid_with_region(a: &RealMatrix, grid: &ComplexGrid, eps: f64, region: BinaryMask, exec: &Exec) -> Result<HybridResult> {
    if !(eps > 0.0) {
        return Err(Error::param(format!("eps must be positive, got {eps}")));
    }
    let start = Instant::now();
    let field = restricted_pseudospectrum(a, grid, &region, exec)?;
    let t_restricted = start.elapsed().as_secs_f64();
    let sensitive = sensitive_zone(&field, eps);
    Ok(HybridResult { field, region, sensitive, nn_evaluations: 0, t_nn: 0.0, t_restricted })
}
