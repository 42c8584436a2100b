//! The baseline-vs-augmented experiment: per seed, split the data, train
//! the generator on the training split, sample synthetic rows, and train
//! two otherwise-identical models — one on the real training split, one on
//! the augmented split — then evaluate both on held-out students.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{build_sequences, load_interactions, split_by_student, write_interactions, Interaction, SplitSpec, StudentSequence, Vocab};
use crate::dkt::{dkt_predict, dkt_train, save_checkpoint, DktCheckpoint, DktConfig, DktParams, DKT_CHECKPOINT_VERSION};
use crate::error::{Error, Result};
use crate::eval::{accuracy, auc, confusion, precision, recall, MetricsReport, SeedMetrics};
use crate::numerics::Rng;
use crate::pipeline::augment::augment;
use crate::pipeline::config::ExperimentConfig;
use crate::pipeline::manifest::{sha256_file, sha256_hex, ArtifactRef, ArtifactRole, RunManifest, StageKind, StageRecord};
use crate::tabddpm::{interaction_schema, interactions_to_rows, save_generator, tabddpm_sample, tabddpm_train, GenConfig, TrainedGenerator};

// stage-id streams for per-seed substreams
const STREAM_GENERATOR: u64 = 1;
const STREAM_SAMPLER: u64 = 2;
const STREAM_DKT: u64 = 3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub baseline: MetricsReport,
    pub augmented: MetricsReport,
    /// Seeds that aborted, with the cause.
    pub incomplete_seeds: Vec<(u64, String)>,
}

pub(crate) struct SeedData {
    pub train: Vec<Interaction>,
    pub train_seqs: Vec<StudentSequence>,
    pub valid_seqs: Vec<StudentSequence>,
    pub test_seqs: Vec<StudentSequence>,
    pub vocab: Vocab,
    pub train_ref: ArtifactRef,
    pub valid_ref: ArtifactRef,
    pub test_ref: ArtifactRef,
}

pub(crate) fn prepare_seed(
    config: &ExperimentConfig,
    interactions: &[Interaction],
    seed: u64,
    seed_dir: &Path,
    manifest: &mut RunManifest,
    corpus_ref: &ArtifactRef,
) -> Result<SeedData> {
    let started = Instant::now();
    std::fs::create_dir_all(seed_dir).map_err(|e| Error::io(seed_dir.display().to_string(), e))?;
    let spec = SplitSpec { seed, ..config.split };
    let (train, valid, test) = split_by_student(interactions, &spec)?;

    let write_part = |name: &str, rows: &[Interaction], role: ArtifactRole| -> Result<ArtifactRef> {
        let path = seed_dir.join(name);
        write_interactions(&path, rows)?;
        ArtifactRef::hashed(role, &path)
    };
    let train_ref = write_part("train.csv", &train, ArtifactRole::TrainSplit)?;
    let valid_ref = write_part("valid.csv", &valid, ArtifactRole::ValidSplit)?;
    let test_ref = write_part("test.csv", &test, ArtifactRole::TestSplit)?;

    manifest.stages.push(StageRecord {
        kind: StageKind::Split,
        seed: Some(seed),
        inputs: vec![corpus_ref.clone()],
        outputs: vec![train_ref.clone(), valid_ref.clone(), test_ref.clone()],
        duration_ms: started.elapsed().as_millis() as u64,
    });

    let vocab = Vocab::build(&train);
    Ok(SeedData {
        train_seqs: build_sequences(&train),
        valid_seqs: build_sequences(&valid),
        test_seqs: build_sequences(&test),
        train,
        vocab,
        train_ref,
        valid_ref,
        test_ref,
    })
}

pub(crate) fn train_generator_stage(
    config: &ExperimentConfig,
    data: &SeedData,
    seed: u64,
    seed_dir: &Path,
    manifest: &mut RunManifest,
) -> Result<(TrainedGenerator, ArtifactRef)> {
    let started = Instant::now();
    let schema = interaction_schema(data.vocab.users(), data.vocab.observed_skills())?;
    let rows = interactions_to_rows(&schema, &data.train)?;
    let gen_config = GenConfig { seed: Rng::new(seed).derive_seed(STREAM_GENERATOR), ..config.generator.clone() };
    let (generator, _curve) = tabddpm_train(&rows, &schema, &gen_config)?;
    let path = seed_dir.join("generator.json");
    save_generator(&path, &generator)?;
    let gen_ref = ArtifactRef::hashed(ArtifactRole::GeneratorCheckpoint, &path)?;
    manifest.stages.push(StageRecord {
        kind: StageKind::TrainGenerator,
        seed: Some(seed),
        inputs: vec![data.train_ref.clone()],
        outputs: vec![gen_ref.clone()],
        duration_ms: started.elapsed().as_millis() as u64,
    });
    Ok((generator, gen_ref))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SyntheticSidecar {
    pub n: usize,
    pub seed: u64,
    pub checkpoint_hash: String,
}

pub(crate) fn sample_stage(
    generator: &TrainedGenerator,
    gen_ref: &ArtifactRef,
    n: usize,
    seed: u64,
    stream: u64,
    out_path: &Path,
    manifest: &mut RunManifest,
) -> Result<(Vec<Interaction>, ArtifactRef)> {
    let started = Instant::now();
    let sample_seed = Rng::new(seed).derive_seed(stream);
    let synthetic = tabddpm_sample(generator, n, &mut Rng::new(sample_seed))?;
    write_interactions(out_path, &synthetic)?;
    let sidecar = SyntheticSidecar {
        n,
        seed: sample_seed,
        checkpoint_hash: gen_ref.hash.clone().unwrap_or_default(),
    };
    let sidecar_path = out_path.with_extension("meta.json");
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)
        .map_err(|e| Error::io(sidecar_path.display().to_string(), e))?;
    let synth_ref = ArtifactRef::hashed(ArtifactRole::SyntheticRows, out_path)?;
    manifest.stages.push(StageRecord {
        kind: StageKind::Sample,
        seed: Some(seed),
        inputs: vec![gen_ref.clone()],
        outputs: vec![synth_ref.clone()],
        duration_ms: started.elapsed().as_millis() as u64,
    });
    Ok((synthetic, synth_ref))
}

/// Test-set evaluation of a trained model: confusion metrics at the
/// configured threshold plus rank AUC.
pub fn evaluate_model(
    params: &DktParams,
    seqs: &[StudentSequence],
    vocab: &Vocab,
    max_len: usize,
    threshold: f64,
    seed: u64,
) -> Result<SeedMetrics> {
    let records = dkt_predict(params, seqs, vocab, max_len)?;
    let counts = confusion(&records, threshold)?;
    let mut notes = Vec::new();
    let prec = precision(&counts);
    let rec = recall(&counts);
    if prec.undefined {
        notes.push(format!("seed {seed}: precision denominator tp+fp = 0, reported as 0"));
    }
    if rec.undefined {
        notes.push(format!("seed {seed}: recall denominator tp+fn = 0, reported as 0"));
    }
    Ok(SeedMetrics {
        seed,
        accuracy: accuracy(&counts)?,
        auc: auc(&records)?,
        precision: prec.percent,
        recall: rec.percent,
        notes,
    })
}

pub(crate) fn train_dkt_stage(
    config: &ExperimentConfig,
    kind: StageKind,
    seqs: &[StudentSequence],
    data: &SeedData,
    seed: u64,
    checkpoint_path: &Path,
    extra_inputs: Vec<ArtifactRef>,
    manifest: &mut RunManifest,
) -> Result<(DktParams, ArtifactRef)> {
    let started = Instant::now();
    let dkt_config = DktConfig { seed: Rng::new(seed).derive_seed(STREAM_DKT), ..config.dkt.clone() };
    let (params, _log) = dkt_train(seqs, &data.valid_seqs, &data.vocab, &dkt_config)?;
    let checkpoint = DktCheckpoint {
        version: DKT_CHECKPOINT_VERSION,
        config: dkt_config,
        num_skills: data.vocab.num_skills(),
        num_users: data.vocab.num_users(),
        params: params.clone(),
    };
    save_checkpoint(checkpoint_path, &checkpoint)?;
    let ckpt_ref = ArtifactRef::hashed(ArtifactRole::DktCheckpoint, checkpoint_path)?;
    let mut inputs = vec![data.train_ref.clone(), data.valid_ref.clone()];
    inputs.extend(extra_inputs);
    manifest.stages.push(StageRecord {
        kind,
        seed: Some(seed),
        inputs,
        outputs: vec![ckpt_ref.clone()],
        duration_ms: started.elapsed().as_millis() as u64,
    });
    Ok((params, ckpt_ref))
}

pub(crate) fn evaluate_stage(
    config: &ExperimentConfig,
    params: &DktParams,
    ckpt_ref: &ArtifactRef,
    data: &SeedData,
    seed: u64,
    manifest: &mut RunManifest,
) -> Result<SeedMetrics> {
    let started = Instant::now();
    let metrics = evaluate_model(params, &data.test_seqs, &data.vocab, config.dkt.max_len, config.threshold, seed)?;
    manifest.stages.push(StageRecord {
        kind: StageKind::Evaluate,
        seed: Some(seed),
        inputs: vec![ckpt_ref.clone(), data.test_ref.clone()],
        outputs: vec![],
        duration_ms: started.elapsed().as_millis() as u64,
    });
    Ok(metrics)
}

pub(crate) fn config_hash(config: &ExperimentConfig) -> Result<String> {
    Ok(sha256_hex(serde_json::to_string(config)?.as_bytes()))
}

/// Runs the full experiment and writes `metrics.json`, `table.txt`, and
/// `manifest.json` under the configured output directory. Deterministic:
/// identical configs produce byte-identical metrics files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let out_dir = &config.output_dir;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;

    let (interactions, _report) = load_interactions(&config.data.path, &config.data.schema)?;
    let mut manifest = RunManifest::new(config_hash(config)?);
    let corpus_hash = sha256_file(&config.data.path)?;
    manifest.input_hashes.insert(config.data.path.display().to_string(), corpus_hash.clone());
    let corpus_ref = ArtifactRef {
        role: ArtifactRole::Corpus,
        path: config.data.path.display().to_string(),
        hash: Some(corpus_hash),
    };

    let mut baseline_runs = Vec::new();
    let mut augmented_runs = Vec::new();
    let mut incomplete = Vec::new();

    for &seed in &config.seeds {
        let seed_dir = out_dir.join(format!("seed_{seed}"));
        let result = run_one_seed(config, &interactions, seed, &seed_dir, &mut manifest, &corpus_ref);
        match result {
            Ok((base, aug)) => {
                baseline_runs.push(base);
                augmented_runs.push(aug);
            }
            Err(e) => {
                eprintln!("seed {seed} aborted: {e}");
                incomplete.push((seed, e.to_string()));
            }
        }
    }

    let mut notes: Vec<String> = incomplete.iter().map(|(s, e)| format!("seed {s} incomplete: {e}")).collect();
    let baseline = MetricsReport::from_seed_metrics("DKT", &baseline_runs)?;
    let mut augmented = MetricsReport::from_seed_metrics(&format!("DKT+TabDDPM({})", config.sample_count), &augmented_runs)?;
    augmented.notes.append(&mut notes);

    manifest.verify_outputs_exist()?;
    manifest.audit_baseline_isolation()?;
    manifest.audit_test_isolation()?;

    let outcome = ExperimentOutcome { baseline, augmented, incomplete_seeds: incomplete };
    let metrics_path = out_dir.join("metrics.json");
    let metrics_json = serde_json::to_string_pretty(&serde_json::json!({
        "baseline": outcome.baseline,
        "augmented": outcome.augmented,
    }))?;
    std::fs::write(&metrics_path, metrics_json).map_err(|e| Error::io(metrics_path.display().to_string(), e))?;

    let table = crate::eval::render_comparison_table(&[outcome.baseline.clone(), outcome.augmented.clone()]);
    let table_path = out_dir.join("table.txt");
    std::fs::write(&table_path, &table).map_err(|e| Error::io(table_path.display().to_string(), e))?;

    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)
        .map_err(|e| Error::io(manifest_path.display().to_string(), e))?;

    Ok(outcome)
}

fn run_one_seed(
    config: &ExperimentConfig,
    interactions: &[Interaction],
    seed: u64,
    seed_dir: &Path,
    manifest: &mut RunManifest,
    corpus_ref: &ArtifactRef,
) -> Result<(SeedMetrics, SeedMetrics)> {
    let data = prepare_seed(config, interactions, seed, seed_dir, manifest, corpus_ref)?;

    // augmented arm data
    let (augmented_seqs, synth_ref) = if config.sample_count > 0 {
        let (generator, gen_ref) = train_generator_stage(config, &data, seed, seed_dir, manifest)?;
        let (synthetic, synth_ref) = sample_stage(
            &generator,
            &gen_ref,
            config.sample_count,
            seed,
            STREAM_SAMPLER,
            &seed_dir.join("synthetic.csv"),
            manifest,
        )?;
        let combined = augment(&data.train, &synthetic);
        manifest.stages.push(StageRecord {
            kind: StageKind::Augment,
            seed: Some(seed),
            inputs: vec![data.train_ref.clone(), synth_ref.clone()],
            outputs: vec![],
            duration_ms: 0,
        });
        (build_sequences(&combined), Some(synth_ref))
    } else {
        (data.train_seqs.clone(), None)
    };

    // identical training seed for both arms: only the data differs
    let (baseline_params, baseline_ref) = train_dkt_stage(
        config,
        StageKind::TrainDktBaseline,
        &data.train_seqs,
        &data,
        seed,
        &seed_dir.join("dkt_baseline.json"),
        vec![],
        manifest,
    )?;
    let (augmented_params, augmented_ref) = train_dkt_stage(
        config,
        StageKind::TrainDktAugmented,
        &augmented_seqs,
        &data,
        seed,
        &seed_dir.join("dkt_augmented.json"),
        synth_ref.into_iter().collect(),
        manifest,
    )?;

    let base_metrics = evaluate_stage(config, &baseline_params, &baseline_ref, &data, seed, manifest)?;
    let aug_metrics = evaluate_stage(config, &augmented_params, &augmented_ref, &data, seed, manifest)?;
    Ok((base_metrics, aug_metrics))
}
