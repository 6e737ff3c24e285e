use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform rectangular grid over `[x_min, x_max] x [y_min, y_max]`, endpoints
/// included. Point `(i, j)` is `x_j + i y_i` with `i` the row (imaginary axis)
/// and `j` the column (real axis).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ComplexGrid {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || !(x_min < x_max) || !(y_min < y_max) {
            return Err(Error::param(format!(
                "grid bounds must be finite and ordered, got [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::param(format!("grid needs at least 2 points per axis, got {nx}x{ny}")));
        }
        Ok(ComplexGrid { x_min, x_max, y_min, y_max, nx, ny })
    }

    /// The `100 x 100` grid over `[-4, 4]^2` used for training and evaluation.
    pub fn standard() -> Self {
        ComplexGrid { x_min: -4.0, x_max: 4.0, y_min: -4.0, y_max: 4.0, nx: 100, ny: 100 }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny).map(|_| ())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * j as f64 / (self.nx - 1) as f64
    }

    #[inline]
    pub fn y(&self, i: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * i as f64 / (self.ny - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(j), self.y(i))
    }

    /// Point at row-major flat index.
    #[inline]
    pub fn point_at(&self, k: usize) -> Complex64 {
        self.point(k / self.nx, k % self.nx)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nx + j
    }
}

/// Convenience constructor mirroring the argument order of the CLI.
pub fn make_grid(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<ComplexGrid> {
    ComplexGrid::new(x_min, x_max, y_min, y_max, nx, ny)
}
