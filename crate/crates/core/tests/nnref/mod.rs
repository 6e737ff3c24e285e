//! Network reference helpers shared by the neural and acceptance tests.

#![allow(dead_code)]

use pseudospectra::features::NUM_FEATURES;
use pseudospectra::neural::network::LAYERS;
use pseudospectra::neural::*;
use pseudospectra::seed;
use rand::Rng;

pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    let mut p = ModelParams::init(rng);
    for k in 0..LAYERS.len() {
        for b in p.bias_mut(k) {
            *b = rng.random_range(-0.1..0.1);
        }
    }
    p
}

pub fn random_inputs(rng: &mut impl Rng, batch: usize) -> (Vec<f64>, Vec<f64>) {
    let phi = (0..batch).flat_map(|_| fourier_encode([rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)])).collect();
    let f = (0..batch * NUM_FEATURES).map(|_| rng.random_range(-2.0..2.0)).collect();
    (phi, f)
}

fn loss_at(p: &ModelParams, phi: &[f64], f: &[f64], y: &[f64]) -> f64 {
    bce_loss(&forward(p, phi, f).unwrap(), y)
}

/// Largest relative error over a sample of parameters from every array.
/// Gradients below 1e-4 in magnitude are compared on an absolute scale.
pub fn gradient_check(seed_value: u64, per_array: usize) -> f64 {
    let mut rng = seed::rng(seed_value);
    let p = random_params(&mut rng);
    let (phi, f) = random_inputs(&mut rng, 3);
    let y: Vec<f64> = (0..3).map(|_| rng.random_range(0..2) as f64).collect();
    let cache = forward_cached(&p, phi.clone(), f.clone()).unwrap();
    let g = backward(&p, &cache, &y);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (k, l) in LAYERS.iter().enumerate() {
        let mut idx: Vec<usize> = (0..per_array).map(|_| ModelParams::weight_index(k, rng.random_range(0..l.out), rng.random_range(0..l.inp))).collect();
        idx.extend((0..per_array).map(|_| ModelParams::bias_index(k, rng.random_range(0..l.out))));
        for i in idx {
            let mut plus = p.clone();
            plus.as_mut_slice()[i] += h;
            let mut minus = p.clone();
            minus.as_mut_slice()[i] -= h;
            let numeric = (loss_at(&plus, &phi, &f, &y) - loss_at(&minus, &phi, &f, &y)) / (2.0 * h);
            let analytic = g.as_slice()[i];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-4);
            worst = worst.max(rel);
        }
    }
    worst
}

pub fn reference_adam_trace(steps: usize, lr: f64) -> Vec<f64> {
    let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8);
    let (mut x, mut m, mut v) = (1.0f64, 0.0f64, 0.0f64);
    let mut out = Vec::new();
    for t in 1..=steps {
        let g = 2.0 * x;
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        let mh = m / (1.0 - b1.powi(t as i32));
        let vh = v / (1.0 - b2.powi(t as i32));
        x -= lr * mh / (vh.sqrt() + eps);
        out.push(x);
    }
    out
}
