//! The headline experiment: train the same model on the raw 5% training
//! split and on the split augmented with diffusion-sampled rows, then
//! compare test metrics across seeds.
//!
//! ```text
//! cargo run --release --example compare_augmentation
//! ```

use dktab::data::{bundled_corpus, write_interactions};
use dktab::eval::render_comparison_table;
use dktab::pipeline::{run_experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("dktab_compare_example");
    std::fs::create_dir_all(&dir)?;
    let corpus_path = dir.join("corpus.csv");
    write_interactions(&corpus_path, &bundled_corpus())?;

    let mut config = ExperimentConfig::default();
    config.data.path = corpus_path;
    config.output_dir = dir.join("out");
    config.seeds = vec![1, 2, 3, 4, 5];
    config.sample_count = 10_000;
    // desk-scale model sizes so the whole run stays in the minutes range
    config.dkt.hidden_size = 64;
    config.dkt.epochs = 30;
    config.dkt.patience = 5;
    config.generator.hidden_sizes = vec![64, 64];
    config.generator.time_embed_dim = 32;
    config.generator.steps = 1_500;
    config.generator.batch_size = 128;

    let outcome = run_experiment(&config)?;
    println!("{}", render_comparison_table(&[outcome.baseline.clone(), outcome.augmented.clone()]));
    println!(
        "AUC gap (augmented - baseline): {:+.2} points",
        outcome.augmented.auc.mean - outcome.baseline.auc.mean
    );
    println!("artifacts under {}", config.output_dir.display());
    Ok(())
}
