//! Student-level train/valid/test partitioning.
//!
//! Splitting by student rather than by row keeps every student's history in
//! exactly one split, so no future of a training student leaks into the
//! test set.

use std::collections::BTreeSet;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::data::Interaction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub valid_frac: f64,
    pub test_frac: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_frac: f64, valid_frac: f64, test_frac: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec { train_frac, valid_frac, test_frac, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fracs = [self.train_frac, self.valid_frac, self.test_frac];
        if fracs.iter().any(|f| *f <= 0.0) {
            return Err(Error::InvalidArgument("split fractions must be positive".into()));
        }
        let sum: f64 = fracs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("split fractions sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

impl Default for SplitSpec {
    /// Small-training regime: 5% train, 20% validation, 75% test.
    fn default() -> Self {
        SplitSpec { train_frac: 0.05, valid_frac: 0.20, test_frac: 0.75, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSummary {
    pub seed: u64,
    pub train_students: usize,
    pub valid_students: usize,
    pub test_students: usize,
    pub train_rows: usize,
    pub valid_rows: usize,
    pub test_rows: usize,
}

/// Shuffles the distinct students with `spec.seed` and partitions them so
/// the student counts match the fractions, remainder going to test. Each
/// output preserves original interaction order.
pub fn split_by_student(
    interactions: &[Interaction],
    spec: &SplitSpec,
) -> Result<(Vec<Interaction>, Vec<Interaction>, Vec<Interaction>)> {
    spec.validate()?;
    let students: Vec<String> = interactions.iter().map(|i| i.user_id.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    if students.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 distinct students, found {}", students.len())));
    }
    let mut shuffled = students;
    let mut rng = crate::numerics::Rng::new(spec.seed);
    rng.shuffle(&mut shuffled);

    let n = shuffled.len();
    // The +1e-9 keeps products like 0.05 * 140 from flooring one short.
    let n_train = ((n as f64 * spec.train_frac) + 1e-9).floor() as usize;
    let n_valid = ((n as f64 * spec.valid_frac) + 1e-9).floor() as usize;
    let n_train = n_train.max(1);
    let n_valid = n_valid.max(1).min(n - n_train - 1);

    let train_set: HashSet<&String> = shuffled[..n_train].iter().collect();
    let valid_set: HashSet<&String> = shuffled[n_train..n_train + n_valid].iter().collect();

    let mut train = Vec::new();
    let mut valid = Vec::new();
    let mut test = Vec::new();
    for i in interactions {
        if train_set.contains(&i.user_id) {
            train.push(i.clone());
        } else if valid_set.contains(&i.user_id) {
            valid.push(i.clone());
        } else {
            test.push(i.clone());
        }
    }
    Ok((train, valid, test))
}

pub fn summarize_split(spec: &SplitSpec, train: &[Interaction], valid: &[Interaction], test: &[Interaction]) -> SplitSummary {
    let count_students = |rows: &[Interaction]| rows.iter().map(|i| i.user_id.as_str()).collect::<HashSet<_>>().len();
    SplitSummary {
        seed: spec.seed,
        train_students: count_students(train),
        valid_students: count_students(valid),
        test_students: count_students(test),
        train_rows: train.len(),
        valid_rows: valid.len(),
        test_rows: test.len(),
    }
}
