//! Adam with bias correction.

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Moment accumulators and step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState { m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }
}

/// One update. Increments `state.t` before applying the bias correction, so
/// the first call uses `t = 1`.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState, lr: f64) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - BETA1.powi(t);
    let c2 = 1.0 - BETA2.powi(t);
    for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        *m = BETA1 * *m + (1.0 - BETA1) * g;
        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + EPSILON);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        for g in [3.0, -0.25, 1e-3] {
            let mut x = [1.0];
            let mut s = AdamState::new(1);
            adam_step(&mut x, &[g], &mut s, 0.01);
            let expected = 1.0 - 0.01 * g.signum();
            assert!((x[0] - expected).abs() < 1e-7, "g={g}: {}", x[0]);
        }
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut x = [0.7, -2.0];
        let mut s = AdamState::new(2);
        for _ in 0..10 {
            adam_step(&mut x, &[0.0, 0.0], &mut s, 0.1);
        }
        assert_eq!(x, [0.7, -2.0]);
    }
}
