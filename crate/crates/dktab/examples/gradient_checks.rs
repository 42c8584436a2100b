//! Verifies the hand-derived gradients of both models against central
//! finite differences on randomized configurations.
//!
//! ```text
//! cargo run --release --example gradient_checks
//! ```

use dktab::data::EncodedStep;
use dktab::dkt::{dkt_loss_and_grads, DktParams};
use dktab::numerics::{grad_check, Rng};
use dktab::tabddpm::{draw_batch_noise, make_schedule, tabddpm_loss_and_grads, tabddpm_loss_with_draws, DenoiserParams, TabRow, TabSchema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = Rng::new(2024);

    println!("recurrent model, BPTT vs central differences:");
    let mut worst_dkt = 0.0f64;
    for &hidden in &[2usize, 8, 32] {
        for &num_skills in &[2usize, 5, 50] {
            for &len in &[2usize, 5, 50] {
                let params = DktParams::init(hidden, num_skills, &mut rng);
                let windows: Vec<Vec<EncodedStep>> = vec![(0..len)
                    .map(|_| EncodedStep {
                        input_index: rng.index(2 * num_skills),
                        target_skill: rng.index(num_skills),
                        target_correct: rng.index(2) as u8,
                    })
                    .collect()];
                let (_, grads) = dkt_loss_and_grads(&params, &windows)?;
                let loss_fn = |groups: &[Vec<f64>]| {
                    let p = DktParams::from_groups(groups, hidden, num_skills).unwrap();
                    dkt_loss_and_grads(&p, &windows).unwrap().0
                };
                let err = grad_check(loss_fn, &params.to_groups(), &grads.to_groups(), 1e-5);
                worst_dkt = worst_dkt.max(err);
                println!("  hidden {hidden:>2}  skills {num_skills:>2}  len {len:>2}  max rel err {err:.3e}");
            }
        }
    }
    println!("worst over 27 configurations: {worst_dkt:.3e}\n");

    println!("denoiser, combined loss vs central differences:");
    let mut worst_gen = 0.0f64;
    for trial in 0..20 {
        let n_num = rng.index(3);
        let n_cat = 1 + rng.index(3);
        let cats: Vec<(String, Vec<String>)> = (0..n_cat)
            .map(|i| {
                let k = 2 + rng.index(3);
                (format!("c{i}"), (0..k).map(|j| format!("v{j}")).collect())
            })
            .collect();
        let schema = TabSchema::new((0..n_num).map(|i| format!("n{i}")).collect(), cats)?;
        let params = DenoiserParams::init(&schema, &[4 + rng.index(8)], 8, &mut rng)?;
        let schedule = make_schedule(4, 0.05, 0.3)?;
        let rows: Vec<TabRow> = (0..2 + rng.index(3))
            .map(|_| TabRow {
                x_num: (0..n_num).map(|_| rng.gaussian()).collect(),
                x_cat: schema.cardinalities().iter().map(|&k| rng.index(k)).collect(),
            })
            .collect();
        let draws = draw_batch_noise(&rows, &params.cardinalities, &schedule, &mut rng);
        let (_, grads) = tabddpm_loss_and_grads(&rows, &draws, &params, &schedule)?;
        let loss_fn = |groups: &[Vec<f64>]| {
            let p = params.from_groups(groups).unwrap();
            tabddpm_loss_with_draws(&rows, &draws, &p, &schedule).unwrap().total
        };
        let err = grad_check(loss_fn, &params.to_groups(), &grads.to_groups(), 1e-5);
        worst_gen = worst_gen.max(err);
        println!("  trial {trial:>2}  ({n_num} numeric, {n_cat} categorical)  max rel err {err:.3e}");
    }
    println!("worst over 20 configurations: {worst_gen:.3e}");

    assert!(worst_dkt < 1e-4 && worst_gen < 1e-4, "a gradient check exceeded 1e-4");
    println!("\nall gradients verified below 1e-4");
    Ok(())
}
