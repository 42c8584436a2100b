//! Provenance for experiment runs: config hash, input hashes, and what
//! every stage read and wrote. The audits below turn two pipeline
//! guarantees into checkable facts: the baseline arm never touches
//! generator artifacts, and the test split is read only at evaluation.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageKind {
    Ingest,
    Split,
    TrainGenerator,
    Sample,
    Augment,
    TrainDktBaseline,
    TrainDktAugmented,
    Evaluate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArtifactRole {
    Corpus,
    TrainSplit,
    ValidSplit,
    TestSplit,
    GeneratorCheckpoint,
    SyntheticRows,
    DktCheckpoint,
    Report,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactRef {
    pub role: ArtifactRole,
    pub path: String,
    /// sha256 of the artifact when it exists on disk at record time.
    pub hash: Option<String>,
}

impl ArtifactRef {
    pub fn new(role: ArtifactRole, path: impl Into<String>) -> Self {
        ArtifactRef { role, path: path.into(), hash: None }
    }

    pub fn hashed(role: ArtifactRole, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(ArtifactRef {
            role,
            path: path.display().to_string(),
            hash: Some(sha256_file(path)?),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub kind: StageKind,
    pub seed: Option<u64>,
    pub inputs: Vec<ArtifactRef>,
    pub outputs: Vec<ArtifactRef>,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub config_hash: String,
    pub input_hashes: BTreeMap<String, String>,
    pub stages: Vec<StageRecord>,
}

impl RunManifest {
    pub fn new(config_hash: String) -> Self {
        RunManifest { version: MANIFEST_VERSION, config_hash, input_hashes: BTreeMap::new(), stages: Vec::new() }
    }

    /// Every referenced output must exist when the manifest is written.
    pub fn verify_outputs_exist(&self) -> Result<()> {
        for stage in &self.stages {
            for artifact in &stage.outputs {
                if !Path::new(&artifact.path).exists() {
                    return Err(Error::Config(format!("manifest references missing artifact {}", artifact.path)));
                }
            }
        }
        Ok(())
    }

    /// The baseline arm must not consume generator checkpoints or
    /// synthetic rows.
    pub fn audit_baseline_isolation(&self) -> Result<()> {
        for stage in &self.stages {
            if stage.kind == StageKind::TrainDktBaseline {
                if let Some(bad) = stage
                    .inputs
                    .iter()
                    .find(|a| matches!(a.role, ArtifactRole::GeneratorCheckpoint | ArtifactRole::SyntheticRows))
                {
                    return Err(Error::Config(format!("baseline stage reads generator artifact {}", bad.path)));
                }
            }
        }
        Ok(())
    }

    /// The test split may only be read by evaluation stages.
    pub fn audit_test_isolation(&self) -> Result<()> {
        for stage in &self.stages {
            if stage.kind != StageKind::Evaluate {
                if let Some(bad) = stage.inputs.iter().find(|a| a.role == ArtifactRole::TestSplit) {
                    return Err(Error::Config(format!(
                        "non-evaluation stage {:?} reads test split {}",
                        stage.kind, bad.path
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path.display().to_string(), e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stage(kind: StageKind, inputs: Vec<ArtifactRef>) -> StageRecord {
        StageRecord { kind, seed: Some(1), inputs, outputs: vec![], duration_ms: 0 }
    }

    #[test]
    fn baseline_audit_catches_generator_reads() {
        let mut manifest = RunManifest::new("h".into());
        manifest.stages.push(stage(
            StageKind::TrainDktBaseline,
            vec![ArtifactRef::new(ArtifactRole::SyntheticRows, "synthetic.csv")],
        ));
        assert!(manifest.audit_baseline_isolation().is_err());
    }

    #[test]
    fn test_split_audit_catches_training_reads() {
        let mut manifest = RunManifest::new("h".into());
        manifest.stages.push(stage(
            StageKind::TrainDktAugmented,
            vec![ArtifactRef::new(ArtifactRole::TestSplit, "test.csv")],
        ));
        assert!(manifest.audit_test_isolation().is_err());
        let mut ok = RunManifest::new("h".into());
        ok.stages.push(stage(StageKind::Evaluate, vec![ArtifactRef::new(ArtifactRole::TestSplit, "test.csv")]));
        assert!(ok.audit_test_isolation().is_ok());
    }

    #[test]
    fn hashing_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
