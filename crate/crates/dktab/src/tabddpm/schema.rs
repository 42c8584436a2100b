//! Column layout for tabular samples: `x = [x_num, x_cat_1..x_cat_C]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TabSchema {
    pub numeric_cols: Vec<String>,
    /// Column name and vocabulary size per categorical feature.
    pub categorical_cols: Vec<(String, usize)>,
    /// Human-readable value per category index, used to decode samples.
    pub category_values: Vec<Vec<String>>,
}

impl TabSchema {
    pub fn new(numeric_cols: Vec<String>, categorical: Vec<(String, Vec<String>)>) -> Result<Self> {
        for (name, values) in &categorical {
            if values.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "categorical column `{name}` needs at least 2 values, got {}",
                    values.len()
                )));
            }
        }
        Ok(TabSchema {
            numeric_cols,
            categorical_cols: categorical.iter().map(|(n, v)| (n.clone(), v.len())).collect(),
            category_values: categorical.into_iter().map(|(_, v)| v).collect(),
        })
    }

    /// Number of categorical features, the C of the combined loss.
    pub fn num_categorical(&self) -> usize {
        self.categorical_cols.len()
    }

    pub fn num_numeric(&self) -> usize {
        self.numeric_cols.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.categorical_cols.iter().map(|(_, k)| *k).collect()
    }

    /// Total one-hot width of the categorical block.
    pub fn one_hot_width(&self) -> usize {
        self.categorical_cols.iter().map(|(_, k)| k).sum()
    }

    pub fn validate_row(&self, row: &TabRow) -> Result<()> {
        if row.x_num.len() != self.num_numeric() || row.x_cat.len() != self.num_categorical() {
            return Err(Error::shape(
                format!("schema ({} numeric, {} categorical)", self.num_numeric(), self.num_categorical()),
                format!("row ({} numeric, {} categorical)", row.x_num.len(), row.x_cat.len()),
            ));
        }
        for (i, (&cat, (name, k))) in row.x_cat.iter().zip(&self.categorical_cols).enumerate() {
            if cat >= *k {
                return Err(Error::InvalidArgument(format!(
                    "category index {cat} out of range for column {i} (`{name}`, K = {k})"
                )));
            }
        }
        Ok(())
    }
}

/// One sample: numeric features (transformed space during diffusion) and a
/// category index per categorical column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabRow {
    pub x_num: Vec<f64>,
    pub x_cat: Vec<usize>,
}

/// The interaction-log schema: `overlap_time` numeric; `user_id`,
/// `skill_id` and `correct` categorical.
pub fn interaction_schema(users: &[String], skills: &[String]) -> Result<TabSchema> {
    TabSchema::new(
        vec!["overlap_time".into()],
        vec![
            ("user_id".into(), users.to_vec()),
            ("skill_id".into(), skills.to_vec()),
            ("correct".into(), vec!["0".into(), "1".into()]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_and_counts() {
        let schema = TabSchema::new(
            vec!["a".into(), "b".into()],
            vec![("c".into(), vec!["x".into(), "y".into(), "z".into()]), ("d".into(), vec!["0".into(), "1".into()])],
        )
        .unwrap();
        assert_eq!(schema.num_numeric(), 2);
        assert_eq!(schema.num_categorical(), 2);
        assert_eq!(schema.one_hot_width(), 5);
        assert_eq!(schema.cardinalities(), vec![3, 2]);
    }

    #[test]
    fn row_validation() {
        let schema = interaction_schema(&["u1".into(), "u2".into()], &["s1".into(), "s2".into(), "s3".into()]).unwrap();
        assert!(schema.validate_row(&TabRow { x_num: vec![0.5], x_cat: vec![1, 2, 0] }).is_ok());
        assert!(schema.validate_row(&TabRow { x_num: vec![0.5], x_cat: vec![1, 3, 0] }).is_err());
        assert!(schema.validate_row(&TabRow { x_num: vec![], x_cat: vec![1, 2, 0] }).is_err());
    }

    #[test]
    fn tiny_vocab_rejected() {
        assert!(TabSchema::new(vec![], vec![("only".into(), vec!["one".into()])]).is_err());
    }
}
