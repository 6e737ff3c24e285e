//! The sensitivity classifier: encoding, network, optimizer, training loop
//! and model files.

pub mod adam;
pub mod bundle;
pub mod encoding;
pub mod network;
pub mod train;

pub use adam::{adam_step, AdamState};
pub use bundle::{load_model, save_model, FeatureNorm, ModelBundle, TrainingMeta};
pub use encoding::{fourier_encode, ENCODED_LEN};
pub use network::{backward, bce_loss, forward, forward_cached, ForwardCache, ModelParams, PARAM_COUNT};
pub use train::{history_csv, train, EarlyStopping, EpochRecord, TrainConfig, TrainOutcome, TrainingSet};
