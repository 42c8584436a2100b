//! Sample-count sweep: one generator per seed, reused across every count,
//! so the curves isolate the effect of synthetic volume.

use serde::{Deserialize, Serialize};

use crate::data::{build_sequences, load_interactions};
use crate::error::{Error, Result};
use crate::eval::{render_comparison_table, MetricsReport, SeedMetrics};
use crate::pipeline::augment::augment;
use crate::pipeline::config::ExperimentConfig;
use crate::pipeline::experiment::{config_hash, evaluate_stage, prepare_seed, sample_stage, train_dkt_stage, train_generator_stage};
use crate::pipeline::manifest::{sha256_file, ArtifactRef, ArtifactRole, RunManifest, StageKind};

// sampling streams per count are offset so each (seed, count) pair has its
// own reproducible stream regardless of processing order
const STREAM_SWEEP_SAMPLER_BASE: u64 = 0x5EED_0000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountReport {
    pub sample_count: usize,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub per_count: Vec<CountReport>,
    pub incomplete_seeds: Vec<(u64, String)>,
}

/// Long-format plot data: one `(count, metric, mean, std)` row per count
/// and metric.
pub fn plot_data_csv(per_count: &[CountReport]) -> String {
    let mut out = String::from("sample_count,metric,mean,std\n");
    for entry in per_count {
        let r = &entry.report;
        for (name, summary) in [
            ("accuracy", &r.accuracy),
            ("auc", &r.auc),
            ("precision", &r.precision),
            ("recall", &r.recall),
        ] {
            out.push_str(&format!("{},{name},{:.6},{:.6}\n", entry.sample_count, summary.mean, summary.std));
        }
    }
    out
}

/// Runs the augmented arm for every sample count, reusing one trained
/// generator per seed. Writes `sweep.json`, `plot_data.csv`, `table.txt`
/// and `manifest.json` under the output directory.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    config.validate()?;
    if config.sample_counts.is_empty() {
        return Err(Error::Config("sample_counts must be non-empty for a sweep".into()));
    }
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

    // per_count_runs[count_index][completed seeds]
    let mut per_count_runs: Vec<Vec<SeedMetrics>> = vec![Vec::new(); config.sample_counts.len()];
    let mut incomplete = Vec::new();

    for &seed in &config.seeds {
        let seed_dir = out_dir.join(format!("seed_{seed}"));
        let result = (|| -> Result<Vec<SeedMetrics>> {
            let data = prepare_seed(config, &interactions, seed, &seed_dir, &mut manifest, &corpus_ref)?;
            let (generator, gen_ref) = train_generator_stage(config, &data, seed, &seed_dir, &mut manifest)?;
            let mut per_count = Vec::with_capacity(config.sample_counts.len());
            for (j, &count) in config.sample_counts.iter().enumerate() {
                let (synthetic, synth_ref) = sample_stage(
                    &generator,
                    &gen_ref,
                    count,
                    seed,
                    STREAM_SWEEP_SAMPLER_BASE + j as u64,
                    &seed_dir.join(format!("synthetic_{count}.csv")),
                    &mut manifest,
                )?;
                let combined = augment(&data.train, &synthetic);
                let augmented_seqs = build_sequences(&combined);
                let (params, ckpt_ref) = train_dkt_stage(
                    config,
                    StageKind::TrainDktAugmented,
                    &augmented_seqs,
                    &data,
                    seed,
                    &seed_dir.join(format!("dkt_augmented_{count}.json")),
                    vec![synth_ref],
                    &mut manifest,
                )?;
                per_count.push(evaluate_stage(config, &params, &ckpt_ref, &data, seed, &mut manifest)?);
            }
            Ok(per_count)
        })();
        match result {
            Ok(metrics) => {
                for (j, m) in metrics.into_iter().enumerate() {
                    per_count_runs[j].push(m);
                }
            }
            Err(e) => {
                eprintln!("sweep seed {seed} aborted: {e}");
                incomplete.push((seed, e.to_string()));
            }
        }
    }

    let mut per_count = Vec::with_capacity(config.sample_counts.len());
    for (j, &count) in config.sample_counts.iter().enumerate() {
        let report = MetricsReport::from_seed_metrics(&format!("DKT+TabDDPM({count})"), &per_count_runs[j])?;
        per_count.push(CountReport { sample_count: count, report });
    }

    manifest.verify_outputs_exist()?;
    manifest.audit_test_isolation()?;

    let sweep_path = out_dir.join("sweep.json");
    std::fs::write(&sweep_path, serde_json::to_string_pretty(&per_count)?)
        .map_err(|e| Error::io(sweep_path.display().to_string(), e))?;
    let plot_path = out_dir.join("plot_data.csv");
    std::fs::write(&plot_path, plot_data_csv(&per_count)).map_err(|e| Error::io(plot_path.display().to_string(), e))?;
    let table_path = out_dir.join("table.txt");
    let table = render_comparison_table(&per_count.iter().map(|c| c.report.clone()).collect::<Vec<_>>());
    std::fs::write(&table_path, table).map_err(|e| Error::io(table_path.display().to_string(), e))?;
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)
        .map_err(|e| Error::io(manifest_path.display().to_string(), e))?;

    Ok(SweepOutcome { per_count, incomplete_seeds: incomplete })
}
