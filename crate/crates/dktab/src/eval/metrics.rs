//! Confusion counts and the threshold metrics derived from them. All
//! metrics are percentages.

use serde::{Deserialize, Serialize};

use crate::dkt::PredictionRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Counts at a fixed threshold; probability >= threshold predicts positive.
pub fn confusion(records: &[PredictionRecord], threshold: f64) -> Result<ConfusionCounts> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to classify".into()));
    }
    if !(0.0 < threshold && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} outside (0, 1)")));
    }
    let mut c = ConfusionCounts { tp: 0, fp: 0, fn_: 0, tn: 0 };
    for r in records {
        let predicted_positive = r.probability >= threshold;
        match (predicted_positive, r.label) {
            (true, 1) => c.tp += 1,
            (true, _) => c.fp += 1,
            (false, 1) => c.fn_ += 1,
            (false, _) => c.tn += 1,
        }
    }
    Ok(c)
}

pub fn accuracy(c: &ConfusionCounts) -> Result<f64> {
    let total = c.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion counts".into()));
    }
    Ok(100.0 * (c.tp + c.tn) as f64 / total as f64)
}

/// A percentage that may be degenerate (zero denominator). Degenerate
/// values are defined as zero and flagged rather than raised, so a report
/// can note them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub percent: f64,
    pub undefined: bool,
}

pub fn precision(c: &ConfusionCounts) -> Ratio {
    let denom = c.tp + c.fp;
    if denom == 0 {
        Ratio { percent: 0.0, undefined: true }
    } else {
        Ratio { percent: 100.0 * c.tp as f64 / denom as f64, undefined: false }
    }
}

pub fn recall(c: &ConfusionCounts) -> Ratio {
    let denom = c.tp + c.fn_;
    if denom == 0 {
        Ratio { percent: 0.0, undefined: true }
    } else {
        Ratio { percent: 100.0 * c.tp as f64 / denom as f64, undefined: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(probability: f64, label: u8) -> PredictionRecord {
        PredictionRecord { probability, label }
    }

    #[test]
    fn hand_classified_pair() {
        let c = confusion(&[rec(0.9, 1), rec(0.2, 0)], 0.5).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 1, fp: 0, fn_: 0, tn: 1 });
    }

    #[test]
    fn perfect_predictor_no_mistakes() {
        let c = confusion(&[rec(1.0, 1), rec(0.0, 0), rec(1.0, 1)], 0.5).unwrap();
        assert_eq!(c.fp, 0);
        assert_eq!(c.fn_, 0);
    }

    #[test]
    fn threshold_boundary_counts_as_positive() {
        let c = confusion(&[rec(0.5, 1), rec(0.5, 0)], 0.5).unwrap();
        assert_eq!(c.tp, 1);
        assert_eq!(c.fp, 1);
        assert_eq!(c.tn + c.fn_, 0);
    }

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&ConfusionCounts { tp: 3, tn: 1, fp: 0, fn_: 0 }).unwrap(), 100.0);
        assert_eq!(accuracy(&ConfusionCounts { tp: 1, tn: 1, fp: 1, fn_: 1 }).unwrap(), 50.0);
        assert_eq!(accuracy(&ConfusionCounts { tp: 5, tn: 2, fp: 2, fn_: 1 }).unwrap(), 70.0);
    }

    #[test]
    fn accuracy_swap_invariance() {
        let c = ConfusionCounts { tp: 7, tn: 3, fp: 2, fn_: 5 };
        let swapped = ConfusionCounts { tp: c.tn, tn: c.tp, fp: c.fn_, fn_: c.fp };
        assert_eq!(accuracy(&c).unwrap(), accuracy(&swapped).unwrap());
    }

    #[test]
    fn precision_and_recall_cases() {
        let p = precision(&ConfusionCounts { tp: 9, fp: 1, fn_: 0, tn: 0 });
        assert_eq!(p.percent, 90.0);
        assert!(!p.undefined);
        let r = recall(&ConfusionCounts { tp: 4, fp: 0, fn_: 0, tn: 3 });
        assert_eq!(r.percent, 100.0);
        let degenerate = precision(&ConfusionCounts { tp: 0, fp: 0, fn_: 2, tn: 3 });
        assert_eq!(degenerate.percent, 0.0);
        assert!(degenerate.undefined);
    }

    #[test]
    fn empty_records_rejected() {
        assert!(confusion(&[], 0.5).is_err());
    }
}
