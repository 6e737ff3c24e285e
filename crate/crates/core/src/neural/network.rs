//! Dual-path classifier with hand-written backpropagation.
//!
//! ```text
//! coordinates: phi(c) (26) -> Dense 64 -> Dense 64 ----+
//!                                                      concat (128) -> Dense 128 = h4
//! features:    f (33)      -> Dense 128 -> Dense 64 ---+                -> Dense 128 = h5
//!                                                      h6 = h4 + h5 -> Dense 64 -> sigmoid
//! ```
//!
//! Every dense layer except the head uses SiLU. Parameters live in one flat
//! buffer laid out layer by layer (weights row-major `out x in`, then bias).

use rand::Rng;

use crate::error::{Error, Result};
use crate::features::NUM_FEATURES;
use crate::neural::encoding::ENCODED_LEN;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerShape {
    pub name: &'static str,
    pub out: usize,
    pub inp: usize,
}

impl LayerShape {
    pub const fn weight_len(&self) -> usize {
        self.out * self.inp
    }

    pub const fn len(&self) -> usize {
        self.out * self.inp + self.out
    }
}

pub const COORD_1: usize = 0;
pub const COORD_2: usize = 1;
pub const MATRIX_1: usize = 2;
pub const MATRIX_2: usize = 3;
pub const TRUNK_4: usize = 4;
pub const TRUNK_5: usize = 5;
pub const PROJ_7: usize = 6;
pub const HEAD: usize = 7;

pub const LAYERS: [LayerShape; 8] = [
    LayerShape { name: "coord_1", out: 64, inp: ENCODED_LEN },
    LayerShape { name: "coord_2", out: 64, inp: 64 },
    LayerShape { name: "matrix_1", out: 128, inp: NUM_FEATURES },
    LayerShape { name: "matrix_2", out: 64, inp: 128 },
    LayerShape { name: "trunk_4", out: 128, inp: 128 },
    LayerShape { name: "trunk_5", out: 128, inp: 128 },
    LayerShape { name: "proj_7", out: 64, inp: 128 },
    LayerShape { name: "head", out: 1, inp: 64 },
];

const fn layer_offsets() -> [usize; 9] {
    let mut off = [0; 9];
    let mut k = 0;
    while k < 8 {
        off[k + 1] = off[k] + LAYERS[k].len();
        k += 1;
    }
    off
}

const OFFSETS: [usize; 9] = layer_offsets();

/// Total number of trainable parameters.
pub const PARAM_COUNT: usize = OFFSETS[8];

/// Network parameters (and, with the same layout, their gradients).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    data: Vec<f64>,
}

impl ModelParams {
    pub fn zeros() -> Self {
        ModelParams { data: vec![0.0; PARAM_COUNT] }
    }

    pub fn from_flat(data: Vec<f64>) -> Result<Self> {
        if data.len() != PARAM_COUNT {
            return Err(Error::param(format!("expected {PARAM_COUNT} parameters, got {}", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("parameters must be finite"));
        }
        Ok(ModelParams { data })
    }

    /// Fan-in scaled uniform weights `U(-sqrt(6 / fan_in), sqrt(6 / fan_in))`, zero biases.
    pub fn init(rng: &mut impl Rng) -> Self {
        let mut p = Self::zeros();
        for (k, shape) in LAYERS.iter().enumerate() {
            let bound = (6.0 / shape.inp as f64).sqrt();
            for w in p.weight_mut(k) {
                *w = rng.random_range(-bound..bound);
            }
        }
        p
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn weight(&self, layer: usize) -> &[f64] {
        let off = OFFSETS[layer];
        &self.data[off..off + LAYERS[layer].weight_len()]
    }

    pub fn weight_mut(&mut self, layer: usize) -> &mut [f64] {
        let off = OFFSETS[layer];
        &mut self.data[off..off + LAYERS[layer].weight_len()]
    }

    pub fn bias(&self, layer: usize) -> &[f64] {
        let off = OFFSETS[layer] + LAYERS[layer].weight_len();
        &self.data[off..OFFSETS[layer + 1]]
    }

    pub fn bias_mut(&mut self, layer: usize) -> &mut [f64] {
        let off = OFFSETS[layer] + LAYERS[layer].weight_len();
        &mut self.data[off..OFFSETS[layer + 1]]
    }

    /// Flat index of weight `(row, col)` of `layer`.
    pub fn weight_index(layer: usize, row: usize, col: usize) -> usize {
        OFFSETS[layer] + row * LAYERS[layer].inp + col
    }

    pub fn bias_index(layer: usize, row: usize) -> usize {
        OFFSETS[layer] + LAYERS[layer].weight_len() + row
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
pub fn silu(x: f64) -> f64 {
    x * sigmoid(x)
}

#[inline]
fn silu_grad(x: f64) -> f64 {
    let s = sigmoid(x);
    s + x * s * (1.0 - s)
}

/// `y (batch x out) = x (batch x inp) W^T + b`.
fn dense_forward(params: &ModelParams, layer: usize, x: &[f64], batch: usize) -> Vec<f64> {
    let LayerShape { out, inp, .. } = LAYERS[layer];
    debug_assert_eq!(x.len(), batch * inp);
    let mut y = vec![0.0; batch * out];
    let w = params.weight(layer);
    unsafe {
        matrixmultiply::dgemm(
            batch,
            inp,
            out,
            1.0,
            x.as_ptr(),
            inp as isize,
            1,
            w.as_ptr(),
            1,
            inp as isize,
            0.0,
            y.as_mut_ptr(),
            out as isize,
            1,
        );
    }
    let b = params.bias(layer);
    for row in y.chunks_exact_mut(out) {
        for (v, bias) in row.iter_mut().zip(b) {
            *v += bias;
        }
    }
    y
}

/// Accumulates `dW = dz^T x` and `db = sum_rows dz` into `grads`, and returns
/// `dx = dz W` when requested.
fn dense_backward(
    params: &ModelParams,
    grads: &mut ModelParams,
    layer: usize,
    x: &[f64],
    dz: &[f64],
    batch: usize,
    want_dx: bool,
) -> Option<Vec<f64>> {
    let LayerShape { out, inp, .. } = LAYERS[layer];
    unsafe {
        matrixmultiply::dgemm(
            out,
            batch,
            inp,
            1.0,
            dz.as_ptr(),
            1,
            out as isize,
            x.as_ptr(),
            inp as isize,
            1,
            1.0,
            grads.weight_mut(layer).as_mut_ptr(),
            inp as isize,
            1,
        );
    }
    let db = grads.bias_mut(layer);
    for row in dz.chunks_exact(out) {
        for (acc, v) in db.iter_mut().zip(row) {
            *acc += v;
        }
    }
    if !want_dx {
        return None;
    }
    let mut dx = vec![0.0; batch * inp];
    unsafe {
        matrixmultiply::dgemm(
            batch,
            out,
            inp,
            1.0,
            dz.as_ptr(),
            out as isize,
            1,
            params.weight(layer).as_ptr(),
            inp as isize,
            1,
            0.0,
            dx.as_mut_ptr(),
            inp as isize,
            1,
        );
    }
    Some(dx)
}

fn silu_all(z: &[f64]) -> Vec<f64> {
    z.iter().map(|&v| silu(v)).collect()
}

/// Intermediate values of one batched forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    batch: usize,
    phi: Vec<f64>,
    feats: Vec<f64>,
    zc1: Vec<f64>,
    hc1: Vec<f64>,
    zc2: Vec<f64>,
    zm1: Vec<f64>,
    hm1: Vec<f64>,
    zm2: Vec<f64>,
    h3: Vec<f64>,
    z4: Vec<f64>,
    h4: Vec<f64>,
    z5: Vec<f64>,
    h6: Vec<f64>,
    z7: Vec<f64>,
    h7: Vec<f64>,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Batched forward pass. `phi` is `batch x 26` encoded coordinates, `feats` is
/// `batch x 33` standardized features, both row-major.
pub fn forward_cached(params: &ModelParams, phi: Vec<f64>, feats: Vec<f64>) -> Result<ForwardCache> {
    if phi.len() % ENCODED_LEN != 0 || feats.len() % NUM_FEATURES != 0 {
        return Err(Error::param("input buffers are not whole rows"));
    }
    let batch = phi.len() / ENCODED_LEN;
    if feats.len() / NUM_FEATURES != batch {
        return Err(Error::param(format!(
            "coordinate batch has {batch} rows but feature batch has {}",
            feats.len() / NUM_FEATURES
        )));
    }
    let zc1 = dense_forward(params, COORD_1, &phi, batch);
    let hc1 = silu_all(&zc1);
    let zc2 = dense_forward(params, COORD_2, &hc1, batch);
    let zm1 = dense_forward(params, MATRIX_1, &feats, batch);
    let hm1 = silu_all(&zm1);
    let zm2 = dense_forward(params, MATRIX_2, &hm1, batch);

    let mut h3 = Vec::with_capacity(batch * 128);
    for b in 0..batch {
        h3.extend(zc2[b * 64..(b + 1) * 64].iter().map(|&v| silu(v)));
        h3.extend(zm2[b * 64..(b + 1) * 64].iter().map(|&v| silu(v)));
    }
    let z4 = dense_forward(params, TRUNK_4, &h3, batch);
    let h4 = silu_all(&z4);
    let z5 = dense_forward(params, TRUNK_5, &h4, batch);
    let h6: Vec<f64> = h4.iter().zip(&z5).map(|(a, &b)| a + silu(b)).collect();
    let z7 = dense_forward(params, PROJ_7, &h6, batch);
    let h7 = silu_all(&z7);
    let logits = dense_forward(params, HEAD, &h7, batch);
    let probs = logits.iter().map(|&v| sigmoid(v)).collect();
    Ok(ForwardCache { batch, phi, feats, zc1, hc1, zc2, zm1, hm1, zm2, h3, z4, h4, z5, h6, z7, h7, logits, probs })
}

/// Probabilities for a batch.
pub fn forward(params: &ModelParams, phi: &[f64], feats: &[f64]) -> Result<Vec<f64>> {
    forward_cached(params, phi.to_vec(), feats.to_vec()).map(|c| c.probs)
}

pub const PROB_CLIP: f64 = 1e-7;

/// Mean binary cross-entropy with probabilities clipped to `[1e-7, 1 - 1e-7]`.
pub fn bce_loss(probs: &[f64], labels: &[f64]) -> f64 {
    assert_eq!(probs.len(), labels.len());
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    total / probs.len() as f64
}

/// Gradient of the mean cross-entropy over the batch in `cache`.
///
/// The logit gradient is `(p - y) / batch`, the exact derivative of the loss
/// for probabilities inside the clip range. Targets may be soft (`y` in `[0, 1]`).
pub fn backward(params: &ModelParams, cache: &ForwardCache, labels: &[f64]) -> ModelParams {
    let batch = cache.batch;
    assert_eq!(labels.len(), batch, "one label per sample");
    let mut g = ModelParams::zeros();

    let dlogit: Vec<f64> = cache.probs.iter().zip(labels).map(|(p, y)| (p - y) / batch as f64).collect();
    let dh7 = dense_backward(params, &mut g, HEAD, &cache.h7, &dlogit, batch, true).unwrap();
    let dz7: Vec<f64> = dh7.iter().zip(&cache.z7).map(|(d, &z)| d * silu_grad(z)).collect();
    let dh6 = dense_backward(params, &mut g, PROJ_7, &cache.h6, &dz7, batch, true).unwrap();

    // h6 = h4 + silu(z5), z5 = W5 h4 + b5
    let dz5: Vec<f64> = dh6.iter().zip(&cache.z5).map(|(d, &z)| d * silu_grad(z)).collect();
    let dh4_branch = dense_backward(params, &mut g, TRUNK_5, &cache.h4, &dz5, batch, true).unwrap();
    let dz4: Vec<f64> = dh6
        .iter()
        .zip(&dh4_branch)
        .zip(&cache.z4)
        .map(|((a, b), &z)| (a + b) * silu_grad(z))
        .collect();
    let dh3 = dense_backward(params, &mut g, TRUNK_4, &cache.h3, &dz4, batch, true).unwrap();

    let mut dzc2 = Vec::with_capacity(batch * 64);
    let mut dzm2 = Vec::with_capacity(batch * 64);
    for b in 0..batch {
        let row = &dh3[b * 128..(b + 1) * 128];
        dzc2.extend(row[..64].iter().zip(&cache.zc2[b * 64..(b + 1) * 64]).map(|(d, &z)| d * silu_grad(z)));
        dzm2.extend(row[64..].iter().zip(&cache.zm2[b * 64..(b + 1) * 64]).map(|(d, &z)| d * silu_grad(z)));
    }

    let dhc1 = dense_backward(params, &mut g, COORD_2, &cache.hc1, &dzc2, batch, true).unwrap();
    let dzc1: Vec<f64> = dhc1.iter().zip(&cache.zc1).map(|(d, &z)| d * silu_grad(z)).collect();
    dense_backward(params, &mut g, COORD_1, &cache.phi, &dzc1, batch, false);

    let dhm1 = dense_backward(params, &mut g, MATRIX_2, &cache.hm1, &dzm2, batch, true).unwrap();
    let dzm1: Vec<f64> = dhm1.iter().zip(&cache.zm1).map(|(d, &z)| d * silu_grad(z)).collect();
    dense_backward(params, &mut g, MATRIX_1, &cache.feats, &dzm1, batch, false);

    g
}
