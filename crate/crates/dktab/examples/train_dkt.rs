//! Trains the knowledge-tracing model alone on a simulated corpus and
//! reports test metrics.
//!
//! ```text
//! cargo run --release --example train_dkt
//! ```

use dktab::data::{build_sequences, bundled_corpus, split_by_student, SplitSpec, Vocab};
use dktab::dkt::{dkt_predict, dkt_train, DktConfig};
use dktab::eval::{accuracy, auc, confusion, precision, recall};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = bundled_corpus();
    let spec = SplitSpec { train_frac: 0.05, valid_frac: 0.20, test_frac: 0.75, seed: 7 };
    let (train, valid, test) = split_by_student(&rows, &spec)?;
    println!("split: {} train rows, {} valid rows, {} test rows", train.len(), valid.len(), test.len());

    let vocab = Vocab::build(&train);
    let config = DktConfig { hidden_size: 64, epochs: 30, patience: 5, seed: 1, ..DktConfig::default() };
    let (params, log) = dkt_train(&build_sequences(&train), &build_sequences(&valid), &vocab, &config)?;
    println!(
        "trained {} epochs (best epoch {}, best valid AUC {:.2})",
        log.epochs.len(),
        log.best_epoch,
        log.best_valid_auc
    );

    let records = dkt_predict(&params, &build_sequences(&test), &vocab, config.max_len)?;
    let counts = confusion(&records, 0.5)?;
    println!("test records: {}", records.len());
    println!("accuracy:  {:.2}%", accuracy(&counts)?);
    println!("auc:       {:.2}%", auc(&records)?);
    println!("precision: {:.2}%", precision(&counts).percent);
    println!("recall:    {:.2}%", recall(&counts).percent);
    Ok(())
}
