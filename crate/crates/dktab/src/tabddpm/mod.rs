//! Mixed-type tabular diffusion: Gaussian noise over numeric columns,
//! uniform-mixing multinomial diffusion over categorical columns, a shared
//! MLP denoiser, and an ancestral sampler that produces synthetic
//! interaction rows.

mod checkpoint;
mod denoiser;
mod kernels;
mod loss;
mod quantile;
mod sample;
mod schedule;
mod schema;
mod train;

pub use checkpoint::{load_generator, save_generator, GeneratorCheckpoint, GENERATOR_CHECKPOINT_VERSION};
pub use denoiser::{denoiser_forward, time_embedding, DenoiserGrads, DenoiserOutput, DenoiserParams, DenseLayer};
pub use kernels::{gaussian_forward_sample, multinomial_forward_probs, multinomial_posterior, one_hot};
pub use loss::{draw_batch_noise, tabddpm_loss, tabddpm_loss_and_grads, tabddpm_loss_with_draws, LossBreakdown, RowDraws};
pub use quantile::{fit_transform_numeric, QuantileTransform};
pub use sample::{interactions_to_rows, rows_to_interactions, tabddpm_sample, tabddpm_sample_rows};
pub use schedule::{default_schedule, make_schedule, DiffusionSchedule};
pub use schema::{interaction_schema, TabRow, TabSchema};
pub use train::{tabddpm_train, GenConfig, TrainedGenerator};
