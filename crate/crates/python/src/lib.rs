//! Python bindings: matrices, grids, fields, the sensitivity model and the
//! hybrid solver.
//!
//! Fields and masks are returned as nested lists indexed `[row][col]`, rows
//! running along the imaginary axis. Unevaluated field entries are `None`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pseudospectra::linalg::{self, BinaryMask, ComplexGrid, RealMatrix};
use pseudospectra::matrix_gen::{generate_corpus, GenSpec, GeneratedMatrix};
use pseudospectra::neural::{self, ModelBundle, TrainConfig};
use pseudospectra::{features, io, pipeline, Complex64, Exec};

fn err(e: pseudospectra::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn exec(threads: usize) -> Exec {
    if threads <= 1 {
        Exec::serial()
    } else {
        Exec::with_threads(threads)
    }
}

fn mask_rows(mask: &BinaryMask) -> Vec<Vec<bool>> {
    mask.bits().chunks(mask.nx()).map(<[bool]>::to_vec).collect()
}

/// Square real matrix.
#[pyclass(module = "pseudospectra_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Matrix {
    inner: RealMatrix,
    bandwidth: Option<usize>,
}

#[pymethods]
impl Matrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix rows must form a square array"));
        }
        let inner = RealMatrix::new(n, rows.concat()).map_err(err)?;
        Ok(Matrix { inner, bandwidth: None })
    }

    /// Reads Matrix Market (`.mtx`) or dense CSV.
    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Matrix { inner: io::read_matrix(&path).map_err(err)?, bandwidth: None })
    }

    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        io::write_matrix(&path, &self.inner).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Bandwidth the matrix was drawn with, if it came from `generate`.
    #[getter]
    fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        self.inner.as_slice().chunks(self.inner.n()).map(<[f64]>::to_vec).collect()
    }

    fn eigenvalues(&self) -> PyResult<Vec<Complex64>> {
        linalg::eigenvalues(&self.inner).map_err(err)
    }

    /// Smallest singular value of `z I - A`.
    fn smin_at(&self, z: Complex64) -> PyResult<f64> {
        linalg::smin_at(&self.inner, z).map_err(err)
    }

    /// The 30 matrix-level descriptors.
    fn global_features(&self) -> PyResult<Vec<f64>> {
        Ok(features::global_features(&self.inner, self.inner.fingerprint()).map_err(err)?.values.to_vec())
    }

    fn __repr__(&self) -> String {
        format!("Matrix(n={})", self.inner.n())
    }
}

/// Uniform rectangular grid over the complex plane.
#[pyclass(module = "pseudospectra_py", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct Grid {
    inner: ComplexGrid,
}

#[pymethods]
impl Grid {
    #[new]
    fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> PyResult<Self> {
        Ok(Grid { inner: ComplexGrid::new(x_min, x_max, y_min, y_max, nx, ny).map_err(err)? })
    }

    /// `[-4, 4]^2` at 100 x 100.
    #[staticmethod]
    fn standard() -> Self {
        Grid { inner: ComplexGrid::standard() }
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.ny, self.inner.nx)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn point(&self, i: usize, j: usize) -> PyResult<Complex64> {
        if i >= self.inner.ny || j >= self.inner.nx {
            return Err(PyValueError::new_err("grid index out of range"));
        }
        Ok(self.inner.point(i, j))
    }

    fn __repr__(&self) -> String {
        let g = &self.inner;
        format!("Grid([{}, {}] x [{}, {}], {} x {})", g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny)
    }
}

/// Minimum singular values over a grid.
#[pyclass(module = "pseudospectra_py", frozen)]
struct Field {
    inner: linalg::SigmaField,
}

#[pymethods]
impl Field {
    fn values(&self) -> Vec<Vec<Option<f64>>> {
        self.inner.values().chunks(self.inner.grid().nx).map(<[Option<f64>]>::to_vec).collect()
    }

    #[getter]
    fn evaluated_count(&self) -> usize {
        self.inner.evaluated_count()
    }

    /// Points with `sigma_min <= eps`.
    fn sensitive_zone(&self, eps: f64) -> Vec<Vec<bool>> {
        mask_rows(&linalg::sensitive_zone(&self.inner, eps))
    }
}

/// Outcome of the hybrid solver on one matrix.
#[pyclass(module = "pseudospectra_py", frozen)]
struct Hybrid {
    #[pyo3(get)]
    field: Py<Field>,
    #[pyo3(get)]
    region: Vec<Vec<bool>>,
    #[pyo3(get)]
    sensitive: Vec<Vec<bool>>,
    #[pyo3(get)]
    nn_evaluations: usize,
    #[pyo3(get)]
    grid_fraction: f64,
    #[pyo3(get)]
    t_nn: f64,
    #[pyo3(get)]
    t_restricted: f64,
}

/// Trained sensitivity classifier with its feature scaling and threshold.
#[pyclass(module = "pseudospectra_py")]
struct Model {
    inner: ModelBundle,
}

fn corpus_of(matrices: &[PyRef<'_, Matrix>]) -> Vec<GeneratedMatrix> {
    matrices
        .iter()
        .enumerate()
        .map(|(index, m)| GeneratedMatrix {
            index,
            seed: 0,
            bandwidth: m.bandwidth.unwrap_or(0),
            kappa: f64::NAN,
            matrix: m.inner.clone(),
        })
        .collect()
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Model { inner: neural::load_model(&path).map_err(err)? })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        neural::save_model(&self.inner, &path).map_err(err)
    }

    /// Calibrated decision threshold, or `None`.
    #[getter]
    fn tau_star(&self) -> Option<f64> {
        self.inner.tau_star
    }

    #[setter]
    fn set_tau_star(&mut self, tau: Option<f64>) -> PyResult<()> {
        if matches!(tau, Some(t) if !(t > 0.0 && t < 1.0)) {
            return Err(PyValueError::new_err("tau_star must lie in (0, 1)"));
        }
        self.inner.tau_star = tau;
        Ok(())
    }

    /// Sensitivity probability at every grid point.
    fn predict_map(&self, matrix: &Matrix, grid: &Grid) -> PyResult<Vec<Vec<f64>>> {
        let p = pipeline::predict_map(&self.inner, &matrix.inner, &grid.inner).map_err(err)?;
        Ok(p.values.chunks(grid.inner.nx).map(<[f64]>::to_vec).collect())
    }

    /// Sweeps the candidate thresholds on validation matrices and stores the
    /// chosen one. Returns `(passed, tau_star, rows)` with rows
    /// `(tau, median_recall, p10_recall, passes)`.
    #[pyo3(signature = (matrices, grid, eps=0.01, threads=1))]
    fn calibrate(
        &mut self,
        matrices: Vec<PyRef<'_, Matrix>>,
        grid: &Grid,
        eps: f64,
        threads: usize,
    ) -> PyResult<(bool, Option<f64>, Vec<(f64, f64, f64, bool)>)> {
        let corpus = corpus_of(&matrices);
        let report = pipeline::calibrate_threshold(&self.inner, &corpus, &grid.inner, eps, &exec(threads)).map_err(err)?;
        let passed = report.apply(&mut self.inner).is_ok();
        let rows = report.rows.iter().map(|r| (r.tau, r.median_recall, r.p10_recall, r.passes)).collect();
        Ok((passed, report.tau_star, rows))
    }

    /// Predicts the sensitive region and computes exact values inside it.
    #[pyo3(signature = (matrix, grid, eps=0.01, threads=1))]
    fn hybrid(&self, py: Python<'_>, matrix: &Matrix, grid: &Grid, eps: f64, threads: usize) -> PyResult<Hybrid> {
        let h = pipeline::hybrid_pseudospectrum(&self.inner, &matrix.inner, &grid.inner, eps, &exec(threads)).map_err(err)?;
        Ok(Hybrid {
            region: mask_rows(&h.region),
            sensitive: mask_rows(&h.sensitive),
            nn_evaluations: h.nn_evaluations,
            grid_fraction: h.grid_fraction(),
            t_nn: h.t_nn,
            t_restricted: h.t_restricted,
            field: Py::new(py, Field { inner: h.field })?,
        })
    }

    /// Benchmarks against the full grid; one JSON object per matrix.
    #[pyo3(signature = (matrices, grid, eps=0.01, random_baseline=true, seed=0, threads=1))]
    fn benchmark(
        &self,
        matrices: Vec<PyRef<'_, Matrix>>,
        grid: &Grid,
        eps: f64,
        random_baseline: bool,
        seed: u64,
        threads: usize,
    ) -> PyResult<Vec<String>> {
        let corpus = corpus_of(&matrices);
        let options = pipeline::BenchmarkOptions { random_baseline, seed };
        let records = pipeline::benchmark(&self.inner, &corpus, &grid.inner, eps, &options, &exec(threads)).map_err(err)?;
        Ok(pipeline::records_jsonl(&records).lines().map(str::to_owned).collect())
    }
}

/// Draws random banded non-normal matrices.
#[pyfunction]
#[pyo3(signature = (count, n=64, seed=0, bandwidths=None))]
fn generate(count: usize, n: usize, seed: u64, bandwidths: Option<Vec<usize>>) -> PyResult<Vec<Matrix>> {
    let mut spec = GenSpec { n, seed, ..GenSpec::default() };
    if let Some(b) = bandwidths {
        spec.bandwidths = b;
    }
    let corpus = generate_corpus(&spec, count, &Exec::serial()).map_err(err)?;
    Ok(corpus.into_iter().map(|g| Matrix { inner: g.matrix, bandwidth: Some(g.bandwidth) }).collect())
}

/// Exact minimum singular values at every grid point.
#[pyfunction]
#[pyo3(signature = (matrix, grid, threads=1))]
fn full_pseudospectrum(matrix: &Matrix, grid: &Grid, threads: usize) -> PyResult<Field> {
    Ok(Field { inner: linalg::full_pseudospectrum(&matrix.inner, &grid.inner, &exec(threads)).map_err(err)? })
}

/// Coordinate encoding fed to the network.
#[pyfunction]
fn fourier_encode(x: f64, y: f64) -> Vec<f64> {
    neural::fourier_encode([x, y]).to_vec()
}

/// Labels the matrices on `grid`, samples a balanced set and trains a model.
#[pyfunction]
#[pyo3(signature = (matrices, grid, eps=0.01, seed=0, max_epochs=25, patience=None, learning_rate=1e-3, batch_size=512, threads=1))]
#[allow(clippy::too_many_arguments)]
fn train(
    matrices: Vec<PyRef<'_, Matrix>>,
    grid: &Grid,
    eps: f64,
    seed: u64,
    max_epochs: usize,
    patience: Option<usize>,
    learning_rate: f64,
    batch_size: usize,
    threads: usize,
) -> PyResult<(Model, Vec<(usize, f64, f64)>)> {
    let corpus = corpus_of(&matrices);
    let config = TrainConfig {
        learning_rate,
        batch_size,
        max_epochs,
        patience: patience.unwrap_or(5.min(max_epochs)),
        seed,
        ..TrainConfig::default()
    };
    let dataset = pipeline::build_dataset(&corpus, &grid.inner, eps, seed, &exec(threads)).map_err(err)?;
    let out = neural::train(&dataset.samples, &config).map_err(err)?;
    let history = out.history.iter().map(|r| (r.epoch, r.train_loss, r.val_loss)).collect();
    Ok((Model { inner: out.bundle }, history))
}

#[pymodule]
fn pseudospectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Matrix>()?;
    m.add_class::<Grid>()?;
    m.add_class::<Field>()?;
    m.add_class::<Hybrid>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(full_pseudospectrum, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_encode, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    Ok(())
}
