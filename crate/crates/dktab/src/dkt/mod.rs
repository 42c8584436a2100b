//! Knowledge-tracing RNN: one-hot (skill, correctness) steps in, per-skill
//! next-answer probabilities out. Trained by backpropagation through time
//! with hand-derived gradients.

mod checkpoint;
mod model;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, DktCheckpoint, DKT_CHECKPOINT_VERSION};
pub use model::{dkt_backward, dkt_forward, dkt_loss, dkt_loss_and_grads, DktGrads, DktParams, PredictionRecord};
pub use train::{dkt_predict, dkt_train, DktConfig, EpochStats, TrainLog};
