//! The `dktab` binary: every pipeline stage as a subcommand, plus `run`
//! and `sweep` for the whole experiment. Stage subcommands read and write
//! the same file formats the library uses, so any stage can be rerun in
//! isolation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::data::{build_sequences, bundled_corpus, load_interactions, simulate_students, split_by_student, write_interactions, ColumnSchema, MasteryParams, SplitSpec, Vocab};
use crate::dkt::{dkt_train, load_checkpoint, save_checkpoint, DktCheckpoint, DKT_CHECKPOINT_VERSION};
use crate::error::{Error, Result};
use crate::eval::render_comparison_table;
use crate::numerics::Rng;
use crate::eval::MetricsReport;
use crate::pipeline::{augment as augment_rows, load_config, parse_override_tokens, run_experiment, sha256_file, sweep as run_sweep, CountReport};
use crate::tabddpm::{interaction_schema, interactions_to_rows, load_generator, save_generator, tabddpm_sample, tabddpm_train};

pub use crate::pipeline::OUTPUT_DIR_ENV;

#[derive(Parser)]
#[command(name = "dktab", version, about = "Knowledge tracing with diffusion-generated synthetic interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config JSON; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted-path overrides, e.g. `--dkt.hidden_size 32 --seeds [7,8]`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<crate::pipeline::ExperimentConfig> {
        let pairs = parse_override_tokens(&self.overrides)?;
        load_config(self.config.as_deref(), &pairs)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a deterministic simulated corpus in the canonical format.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 500)]
        students: usize,
        #[arg(long, default_value_t = 20)]
        skills: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Load a raw interaction log, dedup, and write the canonical file.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "user_id")]
        user_col: String,
        #[arg(long, default_value = "skill_id")]
        skill_col: String,
        #[arg(long, default_value = "correct")]
        correct_col: String,
        #[arg(long, default_value = "overlap_time")]
        time_col: String,
    },
    /// Split a canonical file by student into train/valid/test.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        train_frac: f64,
        #[arg(long, default_value_t = 0.20)]
        valid_frac: f64,
        #[arg(long, default_value_t = 0.75)]
        test_frac: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train the knowledge-tracing model on a training split.
    TrainDkt {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        valid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Train the tabular diffusion generator on a training split.
    TrainGen {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Sample synthetic interactions from a generator checkpoint.
    Generate {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Concatenate a training split with synthetic rows (namespaced).
    Augment {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        synthetic: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a model checkpoint on a data file.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Training split used to rebuild the vocabulary.
        #[arg(long)]
        train: PathBuf,
        /// Data to evaluate on (typically the test split).
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full experiment: baseline vs augmented across seeds.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Sample-count sweep of the augmented arm.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Render a metrics JSON (from run or sweep) as an aligned table.
    Report {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Simulate { out, students, skills, steps, seed } => {
            let rows = match seed {
                None if students == 500 && skills == 20 && steps == 100 => bundled_corpus(),
                _ => {
                    let seed = seed.unwrap_or(crate::data::BUNDLED_SEED);
                    let mut rng = Rng::new(seed ^ 0xD1FF);
                    let params: Vec<MasteryParams> = (0..skills)
                        .map(|_| MasteryParams {
                            p_init: rng.uniform_range(0.05, 0.65),
                            p_learn: rng.uniform_range(0.02, 0.12),
                            p_guess: rng.uniform_range(0.05, 0.55),
                            p_slip: rng.uniform_range(0.02, 0.30),
                        })
                        .collect();
                    simulate_students(students, skills, &params, steps, seed)?
                }
            };
            write_interactions(&out, &rows)?;
            println!("wrote {} interactions to {}", rows.len(), out.display());
            Ok(0)
        }
        Command::Ingest { input, output, user_col, skill_col, correct_col, time_col } => {
            let schema = ColumnSchema { user_id: user_col, skill_id: skill_col, correct: correct_col, overlap_time: time_col };
            let (rows, report) = load_interactions(&input, &schema)?;
            write_interactions(&output, &rows)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
        Command::Split { input, out_dir, train_frac, valid_frac, test_frac, seed } => {
            let (rows, _) = load_interactions(&input, &ColumnSchema::default())?;
            let spec = SplitSpec { train_frac, valid_frac, test_frac, seed };
            let (train, valid, test) = split_by_student(&rows, &spec)?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
            for (name, part) in [("train", &train), ("valid", &valid), ("test", &test)] {
                write_interactions(out_dir.join(format!("{name}.csv")), part)?;
                let mut users: Vec<&str> = part.iter().map(|i| i.user_id.as_str()).collect();
                users.sort_unstable();
                users.dedup();
                let list_path = out_dir.join(format!("{name}_users.txt"));
                std::fs::write(&list_path, users.join("\n") + "\n")
                    .map_err(|e| Error::io(list_path.display().to_string(), e))?;
            }
            let summary = crate::data::summarize_split(&spec, &train, &valid, &test);
            let vocab = Vocab::build(&train);
            let summary_path = out_dir.join("summary.json");
            let summary_json = serde_json::json!({
                "seed": spec.seed,
                "counts": summary,
                "vocabulary": { "skills": vocab.num_skills(), "users": vocab.num_users() },
            });
            std::fs::write(&summary_path, serde_json::to_string_pretty(&summary_json)?)
                .map_err(|e| Error::io(summary_path.display().to_string(), e))?;
            println!("{}", serde_json::to_string_pretty(&summary_json)?);
            Ok(0)
        }
        Command::TrainDkt { train, valid, out, config } => {
            let config = config.load()?;
            let (train_rows, _) = load_interactions(&train, &ColumnSchema::default())?;
            let (valid_rows, _) = load_interactions(&valid, &ColumnSchema::default())?;
            let vocab = Vocab::build(&train_rows);
            let train_seqs = build_sequences(&train_rows);
            let valid_seqs = build_sequences(&valid_rows);
            let (params, log) = dkt_train(&train_seqs, &valid_seqs, &vocab, &config.dkt)?;
            let checkpoint = DktCheckpoint {
                version: DKT_CHECKPOINT_VERSION,
                config: config.dkt.clone(),
                num_skills: vocab.num_skills(),
                num_users: vocab.num_users(),
                params,
            };
            save_checkpoint(&out, &checkpoint)?;
            println!("{}", serde_json::to_string_pretty(&log)?);
            Ok(0)
        }
        Command::TrainGen { train, out, config } => {
            let config = config.load()?;
            let (train_rows, _) = load_interactions(&train, &ColumnSchema::default())?;
            let vocab = Vocab::build(&train_rows);
            let schema = interaction_schema(vocab.users(), vocab.observed_skills())?;
            let rows = interactions_to_rows(&schema, &train_rows)?;
            let (generator, curve) = tabddpm_train(&rows, &schema, &config.generator)?;
            save_generator(&out, &generator)?;
            let smoothed: Vec<f64> = curve.chunks(100).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
            println!("trained {} steps; smoothed loss {:?} -> {:?}", curve.len(), smoothed.first(), smoothed.last());
            Ok(0)
        }
        Command::Generate { generator, count, seed, out } => {
            let loaded = load_generator(&generator)?;
            let synthetic = tabddpm_sample(&loaded, count, &mut Rng::new(seed))?;
            write_interactions(&out, &synthetic)?;
            let sidecar = serde_json::json!({
                "n": count,
                "seed": seed,
                "checkpoint_hash": sha256_file(&generator)?,
            });
            let sidecar_path = out.with_extension("meta.json");
            std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)
                .map_err(|e| Error::io(sidecar_path.display().to_string(), e))?;
            println!("wrote {count} synthetic rows to {}", out.display());
            Ok(0)
        }
        Command::Augment { train, synthetic, out } => {
            let (train_rows, _) = load_interactions(&train, &ColumnSchema::default())?;
            let (synth_rows, _) = load_interactions(&synthetic, &ColumnSchema::default())?;
            let combined = augment_rows(&train_rows, &synth_rows);
            write_interactions(&out, &combined)?;
            println!("wrote {} combined rows to {}", combined.len(), out.display());
            Ok(0)
        }
        Command::Eval { checkpoint, train, data, threshold, out } => {
            let loaded = load_checkpoint(&checkpoint)?;
            let (train_rows, _) = load_interactions(&train, &ColumnSchema::default())?;
            let vocab = Vocab::build(&train_rows);
            let (rows, _) = load_interactions(&data, &ColumnSchema::default())?;
            let seqs = build_sequences(&rows);
            let metrics = crate::pipeline::evaluate_model(&loaded.params, &seqs, &vocab, loaded.config.max_len, threshold, 0)?;
            let json = serde_json::to_string_pretty(&metrics)?;
            if let Some(path) = out {
                std::fs::write(&path, &json).map_err(|e| Error::io(path.display().to_string(), e))?;
            }
            println!("{json}");
            Ok(0)
        }
        Command::Run { config } => {
            let config = config.load()?;
            let outcome = run_experiment(&config)?;
            println!("{}", render_comparison_table(&[outcome.baseline.clone(), outcome.augmented.clone()]));
            if outcome.incomplete_seeds.is_empty() {
                Ok(0)
            } else {
                eprintln!("{} seed(s) incomplete", outcome.incomplete_seeds.len());
                Ok(2)
            }
        }
        Command::Sweep { config } => {
            let config = config.load()?;
            let outcome = run_sweep(&config)?;
            let reports: Vec<MetricsReport> = outcome.per_count.iter().map(|c| c.report.clone()).collect();
            println!("{}", render_comparison_table(&reports));
            if outcome.incomplete_seeds.is_empty() {
                Ok(0)
            } else {
                eprintln!("{} seed(s) incomplete", outcome.incomplete_seeds.len());
                Ok(2)
            }
        }
        Command::Report { metrics, out } => {
            let text = std::fs::read_to_string(&metrics).map_err(|e| Error::io(metrics.display().to_string(), e))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let reports: Vec<MetricsReport> = if value.is_array() {
                let counts: Vec<CountReport> = serde_json::from_value(value)?;
                counts.into_iter().map(|c| c.report).collect()
            } else {
                let baseline: MetricsReport = serde_json::from_value(value["baseline"].clone())?;
                let augmented: MetricsReport = serde_json::from_value(value["augmented"].clone())?;
                vec![baseline, augmented]
            };
            let table = render_comparison_table(&reports);
            if let Some(path) = out {
                std::fs::write(&path, &table).map_err(|e| Error::io(path.display().to_string(), e))?;
            }
            println!("{table}");
            Ok(0)
        }
    }
}
