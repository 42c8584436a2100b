//! Noise schedule shared by the Gaussian and multinomial chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// β_t, α_t = 1 − β_t and ᾱ_t = Π α_s for t = 1..T, stored 0-indexed.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DiffusionSchedule {
    beta: Vec<f64>,
    alpha: Vec<f64>,
    alpha_bar: Vec<f64>,
}

impl DiffusionSchedule {
    pub fn num_steps(&self) -> usize {
        self.beta.len()
    }

    /// `t` is 1-based, matching the chain index.
    pub fn beta(&self, t: usize) -> f64 {
        self.beta[t - 1]
    }

    pub fn alpha(&self, t: usize) -> f64 {
        self.alpha[t - 1]
    }

    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bar[t - 1]
    }

    /// ᾱ_{t−1} with the convention ᾱ_0 = 1.
    pub fn alpha_bar_prev(&self, t: usize) -> f64 {
        if t <= 1 {
            1.0
        } else {
            self.alpha_bar[t - 2]
        }
    }

    /// Posterior variance β̃_t = (1 − ᾱ_{t−1}) / (1 − ᾱ_t) · β_t.
    pub fn posterior_variance(&self, t: usize) -> f64 {
        (1.0 - self.alpha_bar_prev(t)) / (1.0 - self.alpha_bar(t)) * self.beta(t)
    }
}

impl DiffusionSchedule {
    /// Builds a schedule from explicit per-step rates, each in (0, 1).
    pub fn from_betas(beta: Vec<f64>) -> Result<DiffusionSchedule> {
        if beta.is_empty() {
            return Err(Error::InvalidArgument("schedule needs at least one step".into()));
        }
        if let Some(bad) = beta.iter().find(|b| !(0.0 < **b && **b < 1.0)) {
            return Err(Error::InvalidArgument(format!("beta value {bad} outside (0, 1)")));
        }
        let alpha: Vec<f64> = beta.iter().map(|b| 1.0 - b).collect();
        let mut alpha_bar = Vec::with_capacity(beta.len());
        let mut running = 1.0;
        for a in &alpha {
            running *= a;
            alpha_bar.push(running);
        }
        Ok(DiffusionSchedule { beta, alpha, alpha_bar })
    }
}

/// β_t linearly spaced over `[beta_min, beta_max]` across `t = 1..T`.
pub fn make_schedule(t_steps: usize, beta_min: f64, beta_max: f64) -> Result<DiffusionSchedule> {
    if t_steps == 0 {
        return Err(Error::InvalidArgument("schedule needs at least one step".into()));
    }
    if !(0.0 < beta_min && beta_min <= beta_max && beta_max < 1.0) {
        return Err(Error::InvalidArgument(format!("invalid beta bounds ({beta_min}, {beta_max}); need 0 < min <= max < 1")));
    }
    let beta: Vec<f64> = if t_steps == 1 {
        vec![beta_min]
    } else {
        (0..t_steps)
            .map(|i| beta_min + (beta_max - beta_min) * i as f64 / (t_steps - 1) as f64)
            .collect()
    };
    DiffusionSchedule::from_betas(beta)
}

/// The standard 1000-step bounds [1e-4, 0.02] rescaled to `t_steps`, so a
/// shorter chain still ends near full noise.
pub fn default_schedule(t_steps: usize) -> Result<DiffusionSchedule> {
    let scale = 1000.0 / t_steps as f64;
    make_schedule(t_steps, (1e-4 * scale).min(0.5), (0.02 * scale).min(0.999))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step() {
        let s = make_schedule(1, 0.5, 0.5).unwrap();
        assert_eq!(s.alpha_bar(1), 0.5);
        assert_eq!(s.alpha_bar_prev(1), 1.0);
    }

    #[test]
    fn hundred_step_product_matches_log_sum() {
        let s = make_schedule(100, 1e-4, 0.02).unwrap();
        let log_sum: f64 = (1..=100).map(|t| (1.0 - s.beta(t)).ln()).sum();
        let expected = log_sum.exp();
        assert!((s.alpha_bar(100) - expected).abs() < 1e-12);
        assert!(s.alpha_bar(100) > 0.0 && s.alpha_bar(100) < 0.4, "alpha_bar_T = {}", s.alpha_bar(100));
    }

    #[test]
    fn alpha_bar_strictly_decreasing() {
        for (t_steps, lo, hi) in [(2, 0.3, 0.3), (50, 1e-3, 0.2), (7, 0.01, 0.9)] {
            let s = make_schedule(t_steps, lo, hi).unwrap();
            for t in 2..=t_steps {
                assert!(s.alpha_bar(t) < s.alpha_bar(t - 1));
            }
            assert!(s.alpha_bar(t_steps) < 1.0);
        }
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(make_schedule(10, 0.0, 0.5).is_err());
        assert!(make_schedule(10, 0.6, 0.5).is_err());
        assert!(make_schedule(10, 0.1, 1.0).is_err());
        assert!(make_schedule(0, 0.1, 0.2).is_err());
    }

    #[test]
    fn default_schedule_ends_near_noise() {
        let s = default_schedule(100).unwrap();
        assert!(s.alpha_bar(100) < 1e-3, "alpha_bar_T = {}", s.alpha_bar(100));
    }
}
