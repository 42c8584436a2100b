//! Empirical-CDF-to-Gaussian quantile transform for numeric columns.
//!
//! Heavy-tailed columns like response times become roughly standard normal
//! after mapping through their empirical CDF and the probit, which is what
//! the Gaussian noising chain assumes. The inverse interpolates back
//! through the stored reference values, so sampled numerics always land
//! inside the training range.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::tabddpm::{TabRow, TabSchema};

const CDF_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ColumnTransform {
    /// Sorted training values, duplicates retained.
    reference: Vec<f64>,
    /// Probit of the (clipped) empirical CDF position of each reference.
    /// Forward and inverse both interpolate against these knots, so a
    /// round trip never re-enters the normal CDF.
    scores: Vec<f64>,
    /// Set when the column was constant; transform emits zeros and the
    /// inverse returns the constant.
    constant: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QuantileTransform {
    columns: Vec<ColumnTransform>,
}

fn probit(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

impl ColumnTransform {
    fn fit(values: &[f64]) -> ColumnTransform {
        let mut reference = values.to_vec();
        reference.sort_by(|a, b| a.partial_cmp(b).expect("finite training values"));
        let m = reference.len();
        let constant = (reference[0] == reference[m - 1]).then_some(reference[0]);
        let scores = if constant.is_some() {
            vec![0.0; m]
        } else {
            (0..m)
                .map(|i| probit((i as f64 / (m - 1) as f64).clamp(CDF_CLIP, 1.0 - CDF_CLIP)))
                .collect()
        };
        ColumnTransform { reference, scores, constant }
    }

    fn transform(&self, v: f64) -> f64 {
        if self.constant.is_some() {
            return 0.0;
        }
        let refs = &self.reference;
        let m = refs.len();
        if v <= refs[0] {
            return self.scores[0];
        }
        if v >= refs[m - 1] {
            return self.scores[m - 1];
        }
        let hi = refs.partition_point(|r| *r < v);
        if refs[hi] == v {
            return self.scores[hi];
        }
        let lo = hi - 1;
        let frac = (v - refs[lo]) / (refs[hi] - refs[lo]);
        self.scores[lo] + frac * (self.scores[hi] - self.scores[lo])
    }

    fn inverse(&self, z: f64) -> f64 {
        if let Some(c) = self.constant {
            return c;
        }
        let m = self.reference.len();
        if z <= self.scores[0] {
            return self.reference[0];
        }
        if z >= self.scores[m - 1] {
            return self.reference[m - 1];
        }
        let hi = self.scores.partition_point(|s| *s < z);
        if self.scores[hi] == z {
            return self.reference[hi];
        }
        let lo = hi - 1;
        let frac = (z - self.scores[lo]) / (self.scores[hi] - self.scores[lo]);
        self.reference[lo] + frac * (self.reference[hi] - self.reference[lo])
    }
}

impl QuantileTransform {
    pub fn transform_value(&self, column: usize, v: f64) -> f64 {
        self.columns[column].transform(v)
    }

    pub fn inverse_value(&self, column: usize, z: f64) -> f64 {
        self.columns[column].inverse(z)
    }

    pub fn transform_row(&self, x_num: &[f64]) -> Vec<f64> {
        x_num.iter().enumerate().map(|(c, v)| self.transform_value(c, *v)).collect()
    }

    pub fn inverse_row(&self, x_num: &[f64]) -> Vec<f64> {
        x_num.iter().enumerate().map(|(c, z)| self.inverse_value(c, *z)).collect()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn constant_columns(&self) -> Vec<usize> {
        self.columns.iter().enumerate().filter_map(|(i, c)| c.constant.map(|_| i)).collect()
    }
}

/// Fits per-column transforms on the training rows and returns them along
/// with the rows mapped into transformed space. Constant columns become
/// zeros with a warning.
pub fn fit_transform_numeric(rows: &[TabRow], schema: &TabSchema) -> Result<(QuantileTransform, Vec<TabRow>)> {
    if rows.len() < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 training rows to fit the transform, got {}", rows.len())));
    }
    for row in rows {
        schema.validate_row(row)?;
    }
    let columns: Vec<ColumnTransform> = (0..schema.num_numeric())
        .map(|c| {
            let values: Vec<f64> = rows.iter().map(|r| r.x_num[c]).collect();
            let fitted = ColumnTransform::fit(&values);
            if fitted.constant.is_some() {
                eprintln!("warning: numeric column `{}` is constant; transformed to zeros", schema.numeric_cols[c]);
            }
            fitted
        })
        .collect();
    let transform = QuantileTransform { columns };
    let transformed = rows
        .iter()
        .map(|r| TabRow { x_num: transform.transform_row(&r.x_num), x_cat: r.x_cat.clone() })
        .collect();
    Ok((transform, transformed))
}
