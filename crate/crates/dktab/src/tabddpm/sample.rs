//! Ancestral sampling from a trained generator.

use std::collections::HashMap;

use crate::data::Interaction;
use crate::error::{Error, Result};
use crate::numerics::Rng;
use crate::tabddpm::denoiser::{assemble_input_for, forward_trace, split_output_for};
use crate::tabddpm::{multinomial_posterior, one_hot, TabRow, TabSchema, TrainedGenerator};

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Runs the reverse chain from pure noise down to `t = 1` and returns rows
/// in the original numeric space. `n = 0` yields an empty list.
pub fn tabddpm_sample_rows(generator: &TrainedGenerator, n: usize, rng: &mut Rng) -> Result<Vec<TabRow>> {
    let params = &generator.params;
    let schedule = &generator.schedule;
    let cardinalities = generator.schema.cardinalities();
    let t_max = schedule.num_steps();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x_num: Vec<f64> = (0..params.num_numeric).map(|_| rng.gaussian()).collect();
        let mut x_cat: Vec<usize> = cardinalities.iter().map(|&k| rng.index(k)).collect();
        for t in (1..=t_max).rev() {
            let onehots: Vec<Vec<f64>> = x_cat.iter().zip(&cardinalities).map(|(&c, &k)| one_hot(c, k)).collect();
            let input = assemble_input_for(params, &x_num, &onehots, t)?;
            let trace = forward_trace(params, input)?;
            let output = split_output_for(params, trace.output);

            // numeric: posterior mean from the eps-parameterization, fixed
            // small variance, no noise on the final step
            let alpha = schedule.alpha(t);
            let alpha_bar = schedule.alpha_bar(t);
            let beta = schedule.beta(t);
            let noise_coef = beta / (1.0 - alpha_bar).sqrt();
            let sigma = if t > 1 { schedule.posterior_variance(t).sqrt() } else { 0.0 };
            for (x, eps_hat) in x_num.iter_mut().zip(&output.eps_hat) {
                let mean = (*x - noise_coef * eps_hat) / alpha.sqrt();
                *x = if t > 1 { mean + sigma * rng.gaussian() } else { mean };
            }

            // categorical: posterior with the softmax head as the x0
            // estimate; the final step samples the decoder directly
            for (i, k) in cardinalities.iter().enumerate() {
                let s = softmax(&output.logits[i]);
                let probs = if t > 1 {
                    multinomial_posterior(&one_hot(x_cat[i], *k), &s, t, schedule)
                } else {
                    s
                };
                x_cat[i] = rng.categorical(&probs);
            }
        }
        out.push(TabRow { x_num: generator.transform.inverse_row(&x_num), x_cat });
    }
    Ok(out)
}

/// Decodes rows into interactions using the schema's column names and
/// category value tables.
pub fn rows_to_interactions(schema: &TabSchema, rows: &[TabRow]) -> Result<Vec<Interaction>> {
    let numeric_col = |name: &str| schema.numeric_cols.iter().position(|c| c == name);
    let cat_col = |name: &str| schema.categorical_cols.iter().position(|(c, _)| c == name);
    let time_idx = numeric_col("overlap_time").ok_or_else(|| Error::Schema("overlap_time".into()))?;
    let user_idx = cat_col("user_id").ok_or_else(|| Error::Schema("user_id".into()))?;
    let skill_idx = cat_col("skill_id").ok_or_else(|| Error::Schema("skill_id".into()))?;
    let correct_idx = cat_col("correct").ok_or_else(|| Error::Schema("correct".into()))?;
    rows.iter()
        .map(|row| {
            schema.validate_row(row)?;
            let correct_value = &schema.category_values[correct_idx][row.x_cat[correct_idx]];
            Ok(Interaction {
                user_id: schema.category_values[user_idx][row.x_cat[user_idx]].clone(),
                skill_id: schema.category_values[skill_idx][row.x_cat[skill_idx]].clone(),
                correct: if correct_value == "1" { 1 } else { 0 },
                overlap_time: row.x_num[time_idx],
            })
        })
        .collect()
}

/// Encodes interactions for generator training; every categorical value
/// must exist in the schema's tables.
pub fn interactions_to_rows(schema: &TabSchema, interactions: &[Interaction]) -> Result<Vec<TabRow>> {
    let lookup: Vec<HashMap<&str, usize>> = schema
        .category_values
        .iter()
        .map(|values| values.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect())
        .collect();
    let cat_col = |name: &str| schema.categorical_cols.iter().position(|(c, _)| c == name);
    let user_idx = cat_col("user_id").ok_or_else(|| Error::Schema("user_id".into()))?;
    let skill_idx = cat_col("skill_id").ok_or_else(|| Error::Schema("skill_id".into()))?;
    let correct_idx = cat_col("correct").ok_or_else(|| Error::Schema("correct".into()))?;
    interactions
        .iter()
        .map(|i| {
            let mut x_cat = vec![0usize; schema.num_categorical()];
            x_cat[user_idx] = *lookup[user_idx]
                .get(i.user_id.as_str())
                .ok_or_else(|| Error::Encoding(format!("user `{}` not in generator vocabulary", i.user_id)))?;
            x_cat[skill_idx] = *lookup[skill_idx]
                .get(i.skill_id.as_str())
                .ok_or_else(|| Error::Encoding(format!("skill `{}` not in generator vocabulary", i.skill_id)))?;
            x_cat[correct_idx] = i.correct as usize;
            Ok(TabRow { x_num: vec![i.overlap_time], x_cat })
        })
        .collect()
}

/// Samples `n` synthetic interactions.
pub fn tabddpm_sample(generator: &TrainedGenerator, n: usize, rng: &mut Rng) -> Result<Vec<Interaction>> {
    let rows = tabddpm_sample_rows(generator, n, rng)?;
    rows_to_interactions(&generator.schema, &rows)
}
