//! Combined diffusion loss: mean-squared noise error for the numeric block
//! plus per-category KL terms averaged over the categorical count.
//!
//! Noise and timestep draws are separated from evaluation so the loss (and
//! its gradient) is a pure function of the parameters once draws are fixed
//! — that is what makes central-difference verification possible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Rng;
use crate::tabddpm::denoiser::{assemble_input_for, backward_trace, forward_trace, DenoiserGrads, DenoiserParams};
use crate::tabddpm::{gaussian_forward_sample, multinomial_forward_probs, multinomial_posterior, one_hot, DiffusionSchedule, TabRow};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossBreakdown {
    /// Mean squared error between true and predicted noise.
    pub l_simple: f64,
    /// One KL (or t=1 decoder NLL) term per categorical column.
    pub l_cat: Vec<f64>,
    /// `l_simple + (Σ l_cat) / C`, or just `l_simple` when C = 0.
    pub total: f64,
}

/// The randomness of one training row, frozen: timestep, Gaussian noise,
/// and the noised state it produced.
#[derive(Debug, Clone)]
pub struct RowDraws {
    pub t: usize,
    pub noise: Vec<f64>,
    pub x_t_num: Vec<f64>,
    pub x_t_cat: Vec<usize>,
}

/// Draws a timestep uniform in `[1, T]` per row, applies the Gaussian
/// forward jump to the numeric block, and samples each categorical from
/// its t-step marginal.
pub fn draw_batch_noise(
    rows: &[TabRow],
    cardinalities: &[usize],
    schedule: &DiffusionSchedule,
    rng: &mut Rng,
) -> Vec<RowDraws> {
    rows.iter()
        .map(|row| {
            let t = 1 + rng.index(schedule.num_steps());
            let (x_t_num, noise) = gaussian_forward_sample(&row.x_num, t, schedule, rng);
            let x_t_cat = row
                .x_cat
                .iter()
                .zip(cardinalities)
                .map(|(&cat, &k)| {
                    let probs = multinomial_forward_probs(&one_hot(cat, k), t, schedule);
                    rng.categorical(&probs)
                })
                .collect();
            RowDraws { t, noise, x_t_num, x_t_cat }
        })
        .collect()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

struct RowTerms {
    l_simple: f64,
    l_cat: Vec<f64>,
    /// Gradient of the TOTAL batch loss wrt the raw network output, already
    /// scaled by 1/batch (and 1/C for categorical heads).
    d_output: Vec<f64>,
}

fn row_terms(
    params: &DenoiserParams,
    row: &TabRow,
    draws: &RowDraws,
    schedule: &DiffusionSchedule,
    batch_scale: f64,
    output: &[f64],
) -> RowTerms {
    let n_num = params.num_numeric;
    let n_cat = params.cardinalities.len();
    let cat_scale = if n_cat > 0 { batch_scale / n_cat as f64 } else { 0.0 };
    let mut d_output = vec![0.0; output.len()];

    // numeric head: mean squared error over numeric dims
    let mut l_simple = 0.0;
    if n_num > 0 {
        for j in 0..n_num {
            let diff = output[j] - draws.noise[j];
            l_simple += diff * diff;
            d_output[j] = batch_scale * 2.0 * diff / n_num as f64;
        }
        l_simple /= n_num as f64;
    }

    // categorical heads
    let mut l_cat = Vec::with_capacity(n_cat);
    let mut offset = n_num;
    for (i, &k) in params.cardinalities.iter().enumerate() {
        let logits = &output[offset..offset + k];
        let s = softmax(logits);
        let x0 = row.x_cat[i];
        if draws.t == 1 {
            // decoder term: negative log-likelihood of the clean category
            l_cat.push(-s[x0].ln());
            for j in 0..k {
                let indicator = if j == x0 { 1.0 } else { 0.0 };
                d_output[offset + j] = cat_scale * (s[j] - indicator);
            }
        } else {
            let x_t = one_hot(draws.x_t_cat[i], k);
            let q = multinomial_posterior(&x_t, &one_hot(x0, k), draws.t, schedule);
            let p = multinomial_posterior(&x_t, &s, draws.t, schedule);
            let kl: f64 = q
                .iter()
                .zip(&p)
                .map(|(qj, pj)| if *qj > 0.0 { qj * (qj / pj).ln() } else { 0.0 })
                .sum();
            l_cat.push(kl);

            // dKL/ds_m = ab_prev * (u_m / Z - q_m / v_m), then softmax backprop
            let alpha = schedule.alpha(draws.t);
            let beta = schedule.beta(draws.t);
            let ab_prev = schedule.alpha_bar_prev(draws.t);
            let kf = k as f64;
            let u: Vec<f64> = x_t.iter().map(|xt| alpha * xt + beta / kf).collect();
            let v: Vec<f64> = s.iter().map(|sj| ab_prev * sj + (1.0 - ab_prev) / kf).collect();
            let z: f64 = u.iter().zip(&v).map(|(uj, vj)| uj * vj).sum();
            let g_s: Vec<f64> = (0..k).map(|m| ab_prev * (u[m] / z - q[m] / v[m])).collect();
            let dot: f64 = s.iter().zip(&g_s).map(|(sj, gj)| sj * gj).sum();
            for j in 0..k {
                d_output[offset + j] = cat_scale * s[j] * (g_s[j] - dot);
            }
        }
        offset += k;
    }
    RowTerms { l_simple, l_cat, d_output }
}

fn accumulate(
    params: &DenoiserParams,
    rows: &[TabRow],
    draws: &[RowDraws],
    schedule: &DiffusionSchedule,
    mut grads: Option<&mut DenoiserGrads>,
) -> Result<LossBreakdown> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    if rows.len() != draws.len() {
        return Err(Error::shape(format!("{} rows", rows.len()), format!("{} draws", draws.len())));
    }
    let n_cat = params.cardinalities.len();
    let batch_scale = 1.0 / rows.len() as f64;
    let mut l_simple = 0.0;
    let mut l_cat = vec![0.0; n_cat];
    for (row, draw) in rows.iter().zip(draws) {
        let input = assemble_input_for(params, &draw.x_t_num, &onehots(&draw.x_t_cat, &params.cardinalities), draw.t)?;
        let trace = forward_trace(params, input)?;
        let terms = row_terms(params, row, draw, schedule, batch_scale, &trace.output);
        l_simple += terms.l_simple;
        for (acc, term) in l_cat.iter_mut().zip(&terms.l_cat) {
            *acc += term;
        }
        if let Some(g) = grads.as_deref_mut() {
            backward_trace(params, &trace, &terms.d_output, g)?;
        }
    }
    l_simple *= batch_scale;
    for c in &mut l_cat {
        *c *= batch_scale;
    }
    let total = if n_cat > 0 { l_simple + l_cat.iter().sum::<f64>() / n_cat as f64 } else { l_simple };
    Ok(LossBreakdown { l_simple, l_cat, total })
}

fn onehots(cats: &[usize], cardinalities: &[usize]) -> Vec<Vec<f64>> {
    cats.iter().zip(cardinalities).map(|(&c, &k)| one_hot(c, k)).collect()
}

/// Loss of a batch under frozen draws. Pure in `params`.
pub fn tabddpm_loss_with_draws(
    rows: &[TabRow],
    draws: &[RowDraws],
    params: &DenoiserParams,
    schedule: &DiffusionSchedule,
) -> Result<LossBreakdown> {
    accumulate(params, rows, draws, schedule, None)
}

/// Loss and parameter gradients under frozen draws.
pub fn tabddpm_loss_and_grads(
    rows: &[TabRow],
    draws: &[RowDraws],
    params: &DenoiserParams,
    schedule: &DiffusionSchedule,
) -> Result<(LossBreakdown, DenoiserGrads)> {
    let mut grads = params.zero_grads();
    let breakdown = accumulate(params, rows, draws, schedule, Some(&mut grads))?;
    Ok((breakdown, grads))
}

/// Training-path loss: draws fresh (t, ε, noisy state) per row, then scores.
pub fn tabddpm_loss(
    rows: &[TabRow],
    params: &DenoiserParams,
    schedule: &DiffusionSchedule,
    rng: &mut Rng,
) -> Result<LossBreakdown> {
    let draws = draw_batch_noise(rows, &params.cardinalities, schedule, rng);
    tabddpm_loss_with_draws(rows, &draws, params, schedule)
}
