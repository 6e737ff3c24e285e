//! Mini-batch training with early stopping on a held-out sample split.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::NUM_FEATURES;
use crate::neural::adam::{adam_step, AdamState};
use crate::neural::bundle::{FeatureNorm, ModelBundle, TrainingMeta};
use crate::neural::encoding::{fourier_encode, ENCODED_LEN};
use crate::neural::network::{backward, bce_loss, forward, forward_cached, ModelParams, PARAM_COUNT};
use crate::seed::{self, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 1e-3, batch_size: 512, max_epochs: 25, patience: 5, validation_fraction: 0.1, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::param("batch size, max epochs and patience must be positive"));
        }
        if self.patience > self.max_epochs {
            return Err(Error::param(format!(
                "patience {} exceeds max epochs {}",
                self.patience, self.max_epochs
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::param(format!(
                "validation fraction must lie in [0, 1), got {}",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

/// Labeled points in columnar form. Features are raw (not standardized).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingSet {
    pub coords: Vec<[f64; 2]>,
    pub features: Vec<[f64; NUM_FEATURES]>,
    pub labels: Vec<f64>,
    pub matrix_ids: Vec<usize>,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn push(&mut self, matrix_id: usize, coord: [f64; 2], features: [f64; NUM_FEATURES], label: f64) {
        self.coords.push(coord);
        self.features.push(features);
        self.labels.push(label);
        self.matrix_ids.push(matrix_id);
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y >= 0.5).count()
    }

    fn check(&self) -> Result<()> {
        let n = self.labels.len();
        if self.coords.len() != n || self.features.len() != n || self.matrix_ids.len() != n {
            return Err(Error::param("training set columns have different lengths"));
        }
        if n == 0 {
            return Err(Error::param("training set is empty"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub bundle: ModelBundle,
    pub history: Vec<EpochRecord>,
}

/// Tracks the best monitored loss and how long it has gone without improving.
#[derive(Clone, Debug)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    best_epoch: usize,
    stale: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping { patience, best: f64::INFINITY, best_epoch: 0, stale: 0 }
    }

    /// Records one epoch; returns true when the loss is a new best.
    pub fn observe(&mut self, epoch: usize, loss: f64) -> bool {
        if loss < self.best {
            self.best = loss;
            self.best_epoch = epoch;
            self.stale = 0;
            true
        } else {
            self.stale += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.stale >= self.patience
    }

    pub fn best(&self) -> (usize, f64) {
        (self.best_epoch, self.best)
    }
}

/// Holds `round(fraction * class_size)` of each label class out, chosen by seed.
fn stratified_split(labels: &[f64], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = seed::rng(seed::split(seed, stream::SPLIT));
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| (labels[i] >= 0.5) == class).collect();
        idx.shuffle(&mut rng);
        let mut k = (fraction * idx.len() as f64).round() as usize;
        if k == idx.len() && k > 0 {
            k -= 1;
        }
        val.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

struct Encoded {
    phi: Vec<f64>,
    feats: Vec<f64>,
}

impl Encoded {
    fn build(set: &TrainingSet, norm: &FeatureNorm) -> Self {
        let mut phi = Vec::with_capacity(set.len() * ENCODED_LEN);
        let mut feats = Vec::with_capacity(set.len() * NUM_FEATURES);
        for (c, f) in set.coords.iter().zip(&set.features) {
            phi.extend_from_slice(&fourier_encode(*c));
            feats.extend_from_slice(&norm.apply(f));
        }
        Encoded { phi, feats }
    }

    fn gather(&self, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let mut phi = Vec::with_capacity(rows.len() * ENCODED_LEN);
        let mut feats = Vec::with_capacity(rows.len() * NUM_FEATURES);
        for &r in rows {
            phi.extend_from_slice(&self.phi[r * ENCODED_LEN..(r + 1) * ENCODED_LEN]);
            feats.extend_from_slice(&self.feats[r * NUM_FEATURES..(r + 1) * NUM_FEATURES]);
        }
        (phi, feats)
    }
}

fn mean_loss(params: &ModelParams, enc: &Encoded, labels: &[f64], rows: &[usize], chunk: usize) -> Result<f64> {
    let mut total = 0.0;
    for part in rows.chunks(chunk.max(1)) {
        let (phi, feats) = enc.gather(part);
        let p = forward(params, &phi, &feats)?;
        let y: Vec<f64> = part.iter().map(|&r| labels[r]).collect();
        total += bce_loss(&p, &y) * part.len() as f64;
    }
    Ok(total / rows.len() as f64)
}

/// Trains a fresh network. Feature statistics come from the training split.
/// When the validation split is empty, early stopping monitors the training
/// loss instead.
pub fn train(set: &TrainingSet, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    set.check()?;
    let (train_rows, val_rows) = stratified_split(&set.labels, config.validation_fraction, config.seed);
    let norm = FeatureNorm::fit(train_rows.iter().map(|&r| &set.features[r]))?;
    let enc = Encoded::build(set, &norm);

    let mut params = ModelParams::init(&mut seed::rng(seed::split(config.seed, stream::INIT)));
    log::info!(
        "training network with {PARAM_COUNT} parameters on {} samples ({} held out)",
        train_rows.len(),
        val_rows.len()
    );
    let mut adam = AdamState::new(PARAM_COUNT);
    let mut stopper = EarlyStopping::new(config.patience);
    let mut best_params = params.clone();
    let mut history = Vec::new();
    let shuffle_base = seed::split(config.seed, stream::SHUFFLE);
    let mut order = train_rows.clone();

    for epoch in 1..=config.max_epochs {
        order.copy_from_slice(&train_rows);
        order.shuffle(&mut seed::rng(seed::split(shuffle_base, epoch as u64)));
        let mut running = 0.0;
        for batch in order.chunks(config.batch_size) {
            let (phi, feats) = enc.gather(batch);
            let y: Vec<f64> = batch.iter().map(|&r| set.labels[r]).collect();
            let cache = forward_cached(&params, phi, feats)?;
            running += bce_loss(&cache.probs, &y) * batch.len() as f64;
            let grads = backward(&params, &cache, &y);
            adam_step(params.as_mut_slice(), grads.as_slice(), &mut adam, config.learning_rate);
        }
        let train_loss = running / order.len() as f64;
        let val_loss = if val_rows.is_empty() {
            f64::NAN
        } else {
            mean_loss(&params, &enc, &set.labels, &val_rows, 4096)?
        };
        let monitored = if val_rows.is_empty() { train_loss } else { val_loss };
        if !monitored.is_finite() {
            return Err(Error::Numerical { operation: "training", context: format!("loss diverged at epoch {epoch}") });
        }
        log::info!("epoch {epoch}: train loss {train_loss:.5}, validation loss {val_loss:.5}");
        history.push(EpochRecord { epoch, train_loss, val_loss });
        if stopper.observe(epoch, monitored) {
            best_params.clone_from(&params);
        }
        if stopper.should_stop() {
            break;
        }
    }

    let (best_epoch, best_loss) = stopper.best();
    let meta = TrainingMeta {
        seed: config.seed,
        epochs_run: history.len(),
        best_epoch,
        best_val_loss: best_loss,
        train_samples: train_rows.len(),
        val_samples: val_rows.len(),
    };
    Ok(TrainOutcome { bundle: ModelBundle::new(best_params, norm, meta), history })
}

/// CSV with header `epoch,train_loss,val_loss`.
pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut s = String::from("epoch,train_loss,val_loss\n");
    for r in history {
        s.push_str(&format!("{},{:?},{:?}\n", r.epoch, r.train_loss, r.val_loss));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopper_runs_full_length_when_improving() {
        let mut s = EarlyStopping::new(5);
        let mut epochs = 0;
        for e in 1..=25 {
            epochs = e;
            s.observe(e, 1.0 / e as f64);
            if s.should_stop() {
                break;
            }
        }
        assert_eq!(epochs, 25);
        assert_eq!(s.best().0, 25);
    }

    #[test]
    fn stopper_halts_after_patience() {
        let mut s = EarlyStopping::new(3);
        let losses = [1.0, 0.5, 0.6, 0.7, 0.55, 0.4];
        let mut stopped_at = None;
        for (e, l) in losses.iter().enumerate() {
            s.observe(e + 1, *l);
            if s.should_stop() {
                stopped_at = Some(e + 1);
                break;
            }
        }
        assert_eq!(stopped_at, Some(5));
        assert_eq!(s.best(), (2, 0.5));
    }

    #[test]
    fn split_is_stratified() {
        let labels: Vec<f64> = (0..200).map(|i| if i % 4 == 0 { 1.0 } else { 0.0 }).collect();
        let (tr, va) = stratified_split(&labels, 0.1, 3);
        assert_eq!(tr.len() + va.len(), 200);
        assert_eq!(va.iter().filter(|&&i| labels[i] == 1.0).count(), 5);
        assert_eq!(va.len(), 20);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert!(TrainConfig { patience: 30, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { batch_size: 0, ..Default::default() }.validate().is_err());
        assert!(train(&TrainingSet::default(), &TrainConfig::default()).is_err());
    }
}
