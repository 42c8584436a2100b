//! Orchestration: configuration, augmentation, the baseline-vs-augmented
//! experiment, the sample-count sweep, and run manifests.

mod augment;
mod config;
mod experiment;
mod manifest;
mod sweep;

pub use augment::{augment, namespaces_disjoint, synthetic_namespace};
pub use config::{apply_overrides, load_config, parse_override_tokens, DataConfig, ExperimentConfig, OUTPUT_DIR_ENV};
pub use experiment::{evaluate_model, run_experiment, ExperimentOutcome};
pub use manifest::{sha256_file, sha256_hex, ArtifactRef, ArtifactRole, RunManifest, StageKind, StageRecord, MANIFEST_VERSION};
pub use sweep::{plot_data_csv, sweep, CountReport, SweepOutcome};
