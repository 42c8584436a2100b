//! ROC AUC via the Mann–Whitney rank statistic.

use crate::dkt::PredictionRecord;
use crate::error::{Error, Result};

/// AUC as a percentage. Tied scores receive average ranks, so the result
/// equals pair counting with half credit for ties.
pub fn auc(records: &[PredictionRecord]) -> Result<f64> {
    let positives = records.iter().filter(|r| r.label == 1).count();
    let negatives = records.len() - positives;
    if positives == 0 || negatives == 0 {
        let missing = if positives == 0 { "positive" } else { "negative" };
        return Err(Error::Eval(format!("AUC needs both classes; no {missing} labels present")));
    }

    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].probability.partial_cmp(&records[b].probability).expect("finite probabilities"));

    // rank sum over positives, average ranks within tied runs
    let mut rank_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && records[order[j + 1]].probability == records[order[i]].probability {
            j += 1;
        }
        let avg_rank = (i + j + 2) as f64 / 2.0; // ranks are 1-based
        for &idx in &order[i..=j] {
            if records[idx].label == 1 {
                rank_sum += avg_rank;
            }
        }
        i = j + 1;
    }

    let p = positives as f64;
    let n = negatives as f64;
    Ok(100.0 * (rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// O(P·N) pair-counting oracle: wins plus half credit for ties, over all
/// positive–negative pairs. Used to cross-check the rank statistic.
pub fn auc_brute_force(records: &[PredictionRecord]) -> Result<f64> {
    let pos: Vec<f64> = records.iter().filter(|r| r.label == 1).map(|r| r.probability).collect();
    let neg: Vec<f64> = records.iter().filter(|r| r.label != 1).map(|r| r.probability).collect();
    if pos.is_empty() || neg.is_empty() {
        let missing = if pos.is_empty() { "positive" } else { "negative" };
        return Err(Error::Eval(format!("AUC needs both classes; no {missing} labels present")));
    }
    let mut credit = 0.0f64;
    for p in &pos {
        for n in &neg {
            if p > n {
                credit += 1.0;
            } else if p == n {
                credit += 0.5;
            }
        }
    }
    Ok(100.0 * credit / (pos.len() * neg.len()) as f64)
}
