//! Forward-noising kernels and the categorical posterior.

use crate::numerics::Rng;
use crate::tabddpm::DiffusionSchedule;

/// Closed-form Gaussian forward jump: `x_t = √ᾱ_t · x_0 + √(1−ᾱ_t) · ε`.
/// Returns the noised vector and the ε that produced it.
pub fn gaussian_forward_sample(
    x0: &[f64],
    t: usize,
    schedule: &DiffusionSchedule,
    rng: &mut Rng,
) -> (Vec<f64>, Vec<f64>) {
    let signal = schedule.alpha_bar(t).sqrt();
    let noise_scale = (1.0 - schedule.alpha_bar(t)).sqrt();
    let noise: Vec<f64> = x0.iter().map(|_| rng.gaussian()).collect();
    let x_t = x0.iter().zip(&noise).map(|(x, e)| signal * x + noise_scale * e).collect();
    (x_t, noise)
}

/// Marginal of the uniform-mixing chain after `t` steps:
/// `q(x_t | x_0) = ᾱ_t · x_0 + (1−ᾱ_t)/K`.
pub fn multinomial_forward_probs(x0_onehot: &[f64], t: usize, schedule: &DiffusionSchedule) -> Vec<f64> {
    let k = x0_onehot.len() as f64;
    let ab = schedule.alpha_bar(t);
    x0_onehot.iter().map(|x| ab * x + (1.0 - ab) / k).collect()
}

/// `q(x_{t−1} | x_t, x_0) ∝ [α_t·x_t + β_t/K] ⊙ [ᾱ_{t−1}·x_0 + (1−ᾱ_{t−1})/K]`,
/// normalized. `x0` may be a point estimate (any distribution over K).
pub fn multinomial_posterior(
    x_t_onehot: &[f64],
    x0_probs: &[f64],
    t: usize,
    schedule: &DiffusionSchedule,
) -> Vec<f64> {
    debug_assert_eq!(x_t_onehot.len(), x0_probs.len());
    let k = x_t_onehot.len() as f64;
    let alpha = schedule.alpha(t);
    let beta = schedule.beta(t);
    let ab_prev = schedule.alpha_bar_prev(t);
    let mut weights: Vec<f64> = x_t_onehot
        .iter()
        .zip(x0_probs)
        .map(|(xt, x0)| (alpha * xt + beta / k) * (ab_prev * x0 + (1.0 - ab_prev) / k))
        .collect();
    let norm: f64 = weights.iter().sum();
    debug_assert!(norm > 0.0, "posterior normalizer vanished");
    for w in &mut weights {
        *w /= norm;
    }
    weights
}

pub fn one_hot(index: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[index] = 1.0;
    v
}
