//! Model checkpoint file: config echo, vocabulary sizes, and the six
//! parameter arrays with shapes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dkt::{DktConfig, DktParams};
use crate::error::{Error, Result};

pub const DKT_CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DktCheckpoint {
    pub version: u32,
    pub config: DktConfig,
    pub num_skills: usize,
    pub num_users: usize,
    pub params: DktParams,
}

pub fn save_checkpoint(path: impl AsRef<Path>, checkpoint: &DktCheckpoint) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::to_writer(std::io::BufWriter::new(file), checkpoint)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<DktCheckpoint> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let checkpoint: DktCheckpoint = serde_json::from_reader(std::io::BufReader::new(file))?;
    if checkpoint.version != DKT_CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported checkpoint version {} (expected {DKT_CHECKPOINT_VERSION})",
            checkpoint.version
        )));
    }
    if checkpoint.params.num_skills() != checkpoint.num_skills {
        return Err(Error::Checkpoint("parameter shapes disagree with recorded vocabulary size".into()));
    }
    if !checkpoint.params.w_hx.is_finite() || !checkpoint.params.w_hh.is_finite() || !checkpoint.params.w_yh.is_finite() {
        return Err(Error::Checkpoint("non-finite parameter values".into()));
    }
    Ok(checkpoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;

    #[test]
    fn roundtrip() {
        let mut rng = Rng::new(1);
        let params = DktParams::init(4, 3, &mut rng);
        let checkpoint = DktCheckpoint {
            version: DKT_CHECKPOINT_VERSION,
            config: DktConfig::default(),
            num_skills: 3,
            num_users: 12,
            params,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dkt.json");
        save_checkpoint(&path, &checkpoint).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back.params.w_hx, checkpoint.params.w_hx);
        assert_eq!(back.num_users, 12);
    }

    #[test]
    fn version_mismatch_rejected() {
        let checkpoint = DktCheckpoint {
            version: 999,
            config: DktConfig::default(),
            num_skills: 2,
            num_users: 1,
            params: DktParams::zeros(2, 2),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dkt.json");
        save_checkpoint(&path, &checkpoint).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
