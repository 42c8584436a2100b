//! Generator checkpoint: schema, transform reference values, schedule, and
//! denoiser weights.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabddpm::{DenoiserParams, DiffusionSchedule, QuantileTransform, TabSchema, TrainedGenerator};

pub const GENERATOR_CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorCheckpoint {
    pub version: u32,
    pub schema: TabSchema,
    pub transform: QuantileTransform,
    pub schedule: DiffusionSchedule,
    pub params: DenoiserParams,
}

impl From<TrainedGenerator> for GeneratorCheckpoint {
    fn from(g: TrainedGenerator) -> Self {
        GeneratorCheckpoint {
            version: GENERATOR_CHECKPOINT_VERSION,
            schema: g.schema,
            transform: g.transform,
            schedule: g.schedule,
            params: g.params,
        }
    }
}

impl From<GeneratorCheckpoint> for TrainedGenerator {
    fn from(c: GeneratorCheckpoint) -> Self {
        TrainedGenerator { params: c.params, transform: c.transform, schedule: c.schedule, schema: c.schema }
    }
}

pub fn save_generator(path: impl AsRef<Path>, generator: &TrainedGenerator) -> Result<()> {
    let path = path.as_ref();
    let checkpoint = GeneratorCheckpoint::from(generator.clone());
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::to_writer(std::io::BufWriter::new(file), &checkpoint)?;
    Ok(())
}

pub fn load_generator(path: impl AsRef<Path>) -> Result<TrainedGenerator> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let checkpoint: GeneratorCheckpoint = serde_json::from_reader(std::io::BufReader::new(file))?;
    if checkpoint.version != GENERATOR_CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported generator checkpoint version {} (expected {GENERATOR_CHECKPOINT_VERSION})",
            checkpoint.version
        )));
    }
    let expected_out = checkpoint.schema.num_numeric() + checkpoint.schema.one_hot_width();
    if checkpoint.params.output_dim() != expected_out {
        return Err(Error::Checkpoint("denoiser output does not match schema".into()));
    }
    Ok(checkpoint.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;
    use crate::tabddpm::{interactions_to_rows, interaction_schema, tabddpm_sample, tabddpm_train, GenConfig};

    #[test]
    fn roundtrip_reproduces_samples() {
        let mut rng = Rng::new(5);
        let interactions: Vec<crate::data::Interaction> = (0..150)
            .map(|i| crate::data::Interaction {
                user_id: format!("u{}", i % 6),
                skill_id: format!("s{}", rng.index(3)),
                correct: rng.index(2) as u8,
                overlap_time: rng.uniform_range(100.0, 5000.0),
            })
            .collect();
        let users: Vec<String> = (0..6).map(|i| format!("u{i}")).collect();
        let skills: Vec<String> = (0..3).map(|i| format!("s{i}")).collect();
        let schema = interaction_schema(&users, &skills).unwrap();
        let rows = interactions_to_rows(&schema, &interactions).unwrap();
        let config = GenConfig {
            t_steps: 6,
            beta_min: 0.02,
            beta_max: 0.3,
            hidden_sizes: vec![12],
            time_embed_dim: 4,
            steps: 30,
            batch_size: 32,
            seed: 7,
            ..GenConfig::default()
        };
        let (generator, _) = tabddpm_train(&rows, &schema, &config).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("generator.json");
        save_generator(&path, &generator).unwrap();
        let restored = load_generator(&path).unwrap();

        let a = tabddpm_sample(&generator, 10, &mut Rng::new(42)).unwrap();
        let b = tabddpm_sample(&restored, 10, &mut Rng::new(42)).unwrap();
        assert_eq!(a, b);
    }
}
