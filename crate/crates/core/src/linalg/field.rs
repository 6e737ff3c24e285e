use crate::error::{Error, Result};
use crate::linalg::grid::ComplexGrid;

/// Per-grid-point minimum singular values. `None` marks a point that was not
/// evaluated (outside a restricted region).
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaField {
    grid: ComplexGrid,
    values: Vec<Option<f64>>,
}

impl SigmaField {
    pub fn new(grid: ComplexGrid, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(format!(
                "field has {} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().flatten().find(|v| !(**v >= 0.0)) {
            return Err(Error::param(format!("singular values must be nonnegative, got {v}")));
        }
        Ok(SigmaField { grid, values })
    }

    /// A field where every point is evaluated.
    pub fn dense(grid: ComplexGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(Some).collect())
    }

    pub fn unevaluated(grid: ComplexGrid) -> Self {
        SigmaField { values: vec![None; grid.len()], grid }
    }

    pub fn grid(&self) -> &ComplexGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[self.grid.index(i, j)]
    }

    pub fn evaluated_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// Boolean mask aligned with a grid (row-major, `ny x nx`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    ny: usize,
    nx: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(ny: usize, nx: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != ny * nx {
            return Err(Error::param(format!(
                "mask has {} entries, expected {ny}x{nx}",
                bits.len()
            )));
        }
        Ok(BinaryMask { ny, nx, bits })
    }

    pub fn empty(ny: usize, nx: usize) -> Self {
        BinaryMask { ny, nx, bits: vec![false; ny * nx] }
    }

    pub fn full(ny: usize, nx: usize) -> Self {
        BinaryMask { ny, nx, bits: vec![true; ny * nx] }
    }

    pub fn for_grid(grid: &ComplexGrid) -> Self {
        Self::empty(grid.ny, grid.nx)
    }

    pub fn from_fn(ny: usize, nx: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(ny * nx);
        for i in 0..ny {
            for j in 0..nx {
                bits.push(f(i, j));
            }
        }
        BinaryMask { ny, nx, bits }
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.nx + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[i * self.nx + j] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.len() as f64
    }

    pub fn matches_grid(&self, grid: &ComplexGrid) -> bool {
        self.ny == grid.ny && self.nx == grid.nx
    }

    fn check_shape(&self, other: &BinaryMask) {
        assert!(
            self.ny == other.ny && self.nx == other.nx,
            "mask shapes differ: {}x{} vs {}x{}",
            self.ny,
            self.nx,
            other.ny,
            other.nx
        );
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.check_shape(other);
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Number of points set in both masks.
    pub fn intersection_count(&self, other: &BinaryMask) -> usize {
        self.check_shape(other);
        self.bits.iter().zip(&other.bits).filter(|(a, b)| **a && **b).count()
    }

    pub fn and(&self, other: &BinaryMask) -> BinaryMask {
        self.check_shape(other);
        BinaryMask {
            ny: self.ny,
            nx: self.nx,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect(),
        }
    }
}

/// Grid points whose evaluated `sigma_min` is at most `eps`. Unevaluated
/// points are never sensitive.
pub fn sensitive_zone(field: &SigmaField, eps: f64) -> BinaryMask {
    let g = field.grid();
    BinaryMask {
        ny: g.ny,
        nx: g.nx,
        bits: field.values().iter().map(|v| matches!(v, Some(s) if *s <= eps)).collect(),
    }
}

/// Binary dilation with a `k x k` square structuring element centered on each
/// pixel, clipped at the borders.
pub fn dilate(mask: &BinaryMask, k: usize) -> Result<BinaryMask> {
    if k % 2 == 0 {
        return Err(Error::param(format!("structuring element size must be odd, got {k}")));
    }
    let r = k / 2;
    let (ny, nx) = (mask.ny, mask.nx);
    // The square element is separable: dilate rows, then columns.
    let mut rows = vec![false; ny * nx];
    for i in 0..ny {
        let src = &mask.bits[i * nx..(i + 1) * nx];
        let dst = &mut rows[i * nx..(i + 1) * nx];
        for (j, &on) in src.iter().enumerate() {
            if on {
                let lo = j.saturating_sub(r);
                let hi = (j + r).min(nx - 1);
                dst[lo..=hi].iter_mut().for_each(|b| *b = true);
            }
        }
    }
    let mut out = vec![false; ny * nx];
    for i in 0..ny {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(ny - 1);
        for j in 0..nx {
            if rows[i * nx + j] {
                for ii in lo..=hi {
                    out[ii * nx + j] = true;
                }
            }
        }
    }
    Ok(BinaryMask { ny, nx, bits: out })
}
