//! Network evaluation over grids: dense maps, coarse-to-fine refinement and
//! predicted regions.

use crate::error::{Error, Result};
use crate::features::{global_features, GlobalFeatures, NUM_FEATURES};
use crate::linalg::{dilate, BinaryMask, ComplexGrid, RealMatrix};
use crate::neural::{forward, fourier_encode, ModelBundle, ENCODED_LEN};
use crate::Complex64;

const CHUNK: usize = 2048;

/// Side of the box applied to thresholded probabilities.
pub const REGION_DILATION: usize = 5;

/// A trained network bound to one matrix.
pub struct Predictor<'a> {
    bundle: &'a ModelBundle,
    global: GlobalFeatures,
}

impl<'a> Predictor<'a> {
    /// Resolvent probes are seeded from the matrix content, so the same matrix
    /// gets the same features wherever it came from.
    pub fn new(bundle: &'a ModelBundle, a: &RealMatrix) -> Result<Self> {
        Ok(Predictor { bundle, global: global_features(a, a.fingerprint())? })
    }

    pub fn with_features(bundle: &'a ModelBundle, global: GlobalFeatures) -> Self {
        Predictor { bundle, global }
    }

    pub fn global(&self) -> &GlobalFeatures {
        &self.global
    }

    /// Probabilities at `points`, in order.
    pub fn probabilities(&self, points: &[Complex64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(points.len());
        for part in points.chunks(CHUNK) {
            let mut phi = Vec::with_capacity(part.len() * ENCODED_LEN);
            let mut feats = Vec::with_capacity(part.len() * NUM_FEATURES);
            for &z in part {
                phi.extend_from_slice(&fourier_encode([z.re, z.im]));
                feats.extend_from_slice(&self.bundle.norm.apply_vector(&self.global.assemble(z)));
            }
            out.extend(forward(&self.bundle.params, &phi, &feats)?);
        }
        Ok(out)
    }
}

/// Probabilities on a grid, row-major like the grid itself.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityField {
    pub grid: ComplexGrid,
    pub values: Vec<f64>,
}

impl ProbabilityField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }
}

/// Network output at every grid point.
pub fn predict_map(bundle: &ModelBundle, a: &RealMatrix, grid: &ComplexGrid) -> Result<ProbabilityField> {
    grid.validate()?;
    let p = Predictor::new(bundle, a)?;
    predict_map_with(&p, grid)
}

pub fn predict_map_with(p: &Predictor<'_>, grid: &ComplexGrid) -> Result<ProbabilityField> {
    let points: Vec<Complex64> = (0..grid.len()).map(|k| grid.point_at(k)).collect();
    Ok(ProbabilityField { grid: *grid, values: p.probabilities(&points)? })
}

/// Linear-interpolation quantile of `values` (which need not be sorted).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty set");
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (pos - lo as f64) * (s[hi] - s[lo])
}

/// Quantile of the coarse probabilities above which a cell is refined.
pub const COARSE_QUANTILE: f64 = 0.8;

#[derive(Clone, Debug)]
pub struct HierarchicalPrediction {
    /// Exact network output on every point of a refined cell; 0 elsewhere.
    pub field: ProbabilityField,
    /// Points of refined cells (the only points carrying network output).
    pub evaluated: BinaryMask,
    pub coarse_evaluations: usize,
    /// Total network evaluations; coarse anchors are reused inside refined cells.
    pub evaluations: usize,
    pub coarse_threshold: f64,
    pub refined_cells: usize,
    pub total_cells: usize,
}

/// Coarse pass on the top-left anchor of each `stride x stride` cell, then a
/// fine pass over every cell whose anchor probability is at least the 80th
/// percentile of anchor probabilities. Cells at the right and bottom edges are
/// clipped to the grid.
pub fn hierarchical_predict(
    bundle: &ModelBundle,
    a: &RealMatrix,
    grid: &ComplexGrid,
    stride: usize,
) -> Result<HierarchicalPrediction> {
    grid.validate()?;
    let p = Predictor::new(bundle, a)?;
    hierarchical_predict_with(&p, grid, stride)
}

pub fn hierarchical_predict_with(p: &Predictor<'_>, grid: &ComplexGrid, stride: usize) -> Result<HierarchicalPrediction> {
    if stride < 2 {
        return Err(Error::param(format!("stride must be at least 2, got {stride}")));
    }
    let rows: Vec<usize> = (0..grid.ny).step_by(stride).collect();
    let cols: Vec<usize> = (0..grid.nx).step_by(stride).collect();
    let anchors: Vec<(usize, usize)> = rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).collect();
    let anchor_points: Vec<Complex64> = anchors.iter().map(|&(i, j)| grid.point(i, j)).collect();
    let coarse = p.probabilities(&anchor_points)?;
    let threshold = quantile(&coarse, COARSE_QUANTILE);

    let mut values = vec![0.0; grid.len()];
    let mut evaluated = BinaryMask::for_grid(grid);
    let mut fine_idx = Vec::new();
    let mut refined = 0;
    for (&(ci, cj), &pc) in anchors.iter().zip(&coarse) {
        if pc < threshold {
            continue;
        }
        refined += 1;
        values[grid.index(ci, cj)] = pc;
        for i in ci..(ci + stride).min(grid.ny) {
            for j in cj..(cj + stride).min(grid.nx) {
                evaluated.set(i, j, true);
                if (i, j) != (ci, cj) {
                    fine_idx.push(grid.index(i, j));
                }
            }
        }
    }
    let fine_points: Vec<Complex64> = fine_idx.iter().map(|&k| grid.point_at(k)).collect();
    let fine = p.probabilities(&fine_points)?;
    for (k, v) in fine_idx.iter().zip(fine) {
        values[*k] = v;
    }
    Ok(HierarchicalPrediction {
        field: ProbabilityField { grid: *grid, values },
        evaluated,
        coarse_evaluations: anchors.len(),
        evaluations: anchors.len() + fine_idx.len(),
        coarse_threshold: threshold,
        refined_cells: refined,
        total_cells: anchors.len(),
    })
}

/// `{p >= tau}` dilated by a 5x5 box.
pub fn predicted_region(field: &ProbabilityField, tau: f64) -> Result<BinaryMask> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::param(format!("tau must lie in (0, 1), got {tau}")));
    }
    let g = &field.grid;
    let raw = BinaryMask::from_fn(g.ny, g.nx, |i, j| field.get(i, j) >= tau);
    dilate(&raw, REGION_DILATION)
}
