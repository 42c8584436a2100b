//! Trains the tabular diffusion generator on a small training split and
//! compares sampled marginals against the real ones.
//!
//! ```text
//! cargo run --release --example train_generator
//! ```

use std::collections::BTreeMap;

use dktab::data::{bundled_corpus, split_by_student, Interaction, SplitSpec, Vocab};
use dktab::numerics::Rng;
use dktab::tabddpm::{interaction_schema, interactions_to_rows, tabddpm_sample, tabddpm_train, GenConfig};

fn skill_marginals(rows: &[Interaction]) -> BTreeMap<String, f64> {
    let mut h = BTreeMap::new();
    for r in rows {
        *h.entry(r.skill_id.clone()).or_insert(0.0) += 1.0 / rows.len() as f64;
    }
    h
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = bundled_corpus();
    let spec = SplitSpec { train_frac: 0.05, valid_frac: 0.20, test_frac: 0.75, seed: 3 };
    let (train, _, _) = split_by_student(&rows, &spec)?;
    println!("training generator on {} rows", train.len());

    let vocab = Vocab::build(&train);
    let schema = interaction_schema(vocab.users(), vocab.observed_skills())?;
    let tab_rows = interactions_to_rows(&schema, &train)?;
    let config = GenConfig {
        hidden_sizes: vec![64, 64],
        time_embed_dim: 32,
        steps: 1_500,
        batch_size: 128,
        seed: 11,
        ..GenConfig::default()
    };
    let (generator, curve) = tabddpm_train(&tab_rows, &schema, &config)?;
    let window = 100;
    let smoothed_start: f64 = curve[..window].iter().sum::<f64>() / window as f64;
    let smoothed_end: f64 = curve[curve.len() - window..].iter().sum::<f64>() / window as f64;
    println!("smoothed loss: {smoothed_start:.4} -> {smoothed_end:.4}");

    let synthetic = tabddpm_sample(&generator, 5_000, &mut Rng::new(99))?;
    let real = skill_marginals(&train);
    let fake = skill_marginals(&synthetic);
    let mut tv = 0.0;
    println!("\nskill        real    sampled");
    for (skill, p) in &real {
        let q = fake.get(skill).copied().unwrap_or(0.0);
        println!("{skill:<10}  {p:.4}  {q:.4}");
        tv += (p - q).abs();
    }
    for (skill, q) in &fake {
        if !real.contains_key(skill) {
            tv += q;
        }
    }
    println!("\ntotal-variation distance of skill marginals: {:.4}", 0.5 * tv);

    let real_rate = train.iter().map(|r| r.correct as usize).sum::<usize>() as f64 / train.len() as f64;
    let fake_rate = synthetic.iter().map(|r| r.correct as usize).sum::<usize>() as f64 / synthetic.len() as f64;
    println!("correct rate: real {real_rate:.4}, sampled {fake_rate:.4}");
    Ok(())
}
