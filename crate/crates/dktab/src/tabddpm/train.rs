//! Generator training: Adam on the combined loss over minibatches of
//! transformed rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{AdamConfig, AdamState, Rng};
use crate::tabddpm::loss::{draw_batch_noise, tabddpm_loss_and_grads};
use crate::tabddpm::{fit_transform_numeric, make_schedule, DenoiserParams, DiffusionSchedule, QuantileTransform, TabRow, TabSchema};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GenConfig {
    /// Diffusion steps T.
    pub t_steps: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub hidden_sizes: Vec<usize>,
    pub time_embed_dim: usize,
    pub learning_rate: f64,
    /// Optimizer steps.
    pub steps: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    /// T = 100 with the 1000-step beta bounds rescaled accordingly.
    fn default() -> Self {
        GenConfig {
            t_steps: 100,
            beta_min: 1e-3,
            beta_max: 0.2,
            hidden_sizes: vec![256, 256],
            time_embed_dim: 64,
            learning_rate: 1e-3,
            steps: 10_000,
            batch_size: 256,
            seed: 0,
        }
    }
}

/// Everything needed to sample: weights, numeric transform, schedule, and
/// the schema that decodes category indices.
#[derive(Debug, Clone)]
pub struct TrainedGenerator {
    pub params: DenoiserParams,
    pub transform: QuantileTransform,
    pub schedule: DiffusionSchedule,
    pub schema: TabSchema,
}

/// Fits the numeric transform, then runs `config.steps` Adam updates on
/// the combined loss. Returns the trained artifacts and the per-step loss
/// curve. Deterministic given the seed.
pub fn tabddpm_train(rows: &[TabRow], schema: &TabSchema, config: &GenConfig) -> Result<(TrainedGenerator, Vec<f64>)> {
    if rows.len() < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 training rows, got {}", rows.len())));
    }
    let (transform, transformed) = fit_transform_numeric(rows, schema)?;
    let schedule = make_schedule(config.t_steps, config.beta_min, config.beta_max)?;
    let mut rng = Rng::new(config.seed);
    let mut params = DenoiserParams::init(schema, &config.hidden_sizes, config.time_embed_dim, &mut rng)?;

    let group_sizes: Vec<usize> = params.to_groups().iter().map(|g| g.len()).collect();
    let mut adam = AdamState::new(AdamConfig::with_lr(config.learning_rate), &group_sizes);
    let names = params.group_names();
    let cardinalities = schema.cardinalities();

    let mut curve = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let batch: Vec<TabRow> = (0..config.batch_size.min(transformed.len()))
            .map(|_| transformed[rng.index(transformed.len())].clone())
            .collect();
        let draws = draw_batch_noise(&batch, &cardinalities, &schedule, &mut rng);
        let (breakdown, grads) = tabddpm_loss_and_grads(&batch, &draws, &params, &schedule)?;
        if !breakdown.total.is_finite() {
            return Err(Error::Training(format!("non-finite loss at step {step}")));
        }
        let grad_groups = grads.to_groups();
        let mut param_groups = params.to_groups();
        {
            let mut step_groups: Vec<(&str, &mut [f64], &[f64])> = param_groups
                .iter_mut()
                .zip(grad_groups.iter())
                .zip(names.iter())
                .map(|((p, g), name)| (name.as_str(), p.as_mut_slice(), g.as_slice()))
                .collect();
            adam.step(&mut step_groups)?;
        }
        params = params.from_groups(&param_groups)?;
        curve.push(breakdown.total);
    }

    Ok((TrainedGenerator { params, transform, schedule, schema: schema.clone() }, curve))
}
