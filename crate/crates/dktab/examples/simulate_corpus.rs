//! Writes the bundled simulated corpus to disk and prints basic stats.
//!
//! ```text
//! cargo run --release --example simulate_corpus -- corpus.csv
//! ```

use std::collections::HashSet;

use dktab::data::{bundled_corpus, write_interactions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "corpus.csv".to_string());
    let rows = bundled_corpus();
    write_interactions(&path, &rows)?;

    let students: HashSet<&str> = rows.iter().map(|r| r.user_id.as_str()).collect();
    let skills: HashSet<&str> = rows.iter().map(|r| r.skill_id.as_str()).collect();
    let correct_rate = rows.iter().map(|r| r.correct as usize).sum::<usize>() as f64 / rows.len() as f64;
    println!("wrote {} interactions to {path}", rows.len());
    println!("students: {}, skills: {}, correct rate: {:.3}", students.len(), skills.len(), correct_rate);
    Ok(())
}
