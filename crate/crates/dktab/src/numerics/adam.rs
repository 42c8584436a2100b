//! Adam over named parameter groups stored as flat slices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub fn with_lr(learning_rate: f64) -> Self {
        AdamConfig { learning_rate, ..Default::default() }
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// First/second moment buffers per parameter group plus the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    config: AdamConfig,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
    step_count: u64,
}

impl AdamState {
    pub fn new(config: AdamConfig, group_sizes: &[usize]) -> Self {
        AdamState {
            config,
            first_moment: group_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: group_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One bias-corrected update. `groups` pairs each parameter slice with
    /// its gradient; order and shapes must match the state's layout.
    pub fn step(&mut self, groups: &mut [(&str, &mut [f64], &[f64])]) -> Result<()> {
        if groups.len() != self.first_moment.len() {
            return Err(Error::shape(format!("{} groups", self.first_moment.len()), format!("{} groups", groups.len())));
        }
        for ((name, params, grads), m) in groups.iter().zip(&self.first_moment) {
            if params.len() != grads.len() || params.len() != m.len() {
                return Err(Error::shape(format!("{name}: {} params", m.len()), format!("{} grads", grads.len())));
            }
            if let Some(bad) = grads.iter().find(|g| !g.is_finite()) {
                return Err(Error::Training(format!("non-finite gradient {bad} in parameter `{name}`")));
            }
        }
        self.step_count += 1;
        let AdamConfig { learning_rate, beta1, beta2, epsilon } = self.config;
        let bias1 = 1.0 - beta1.powi(self.step_count as i32);
        let bias2 = 1.0 - beta2.powi(self.step_count as i32);
        for (gi, (_, params, grads)) in groups.iter_mut().enumerate() {
            let m = &mut self.first_moment[gi];
            let v = &mut self.second_moment[gi];
            for i in 0..params.len() {
                let g = grads[i];
                m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                let m_hat = m[i] / bias1;
                let v_hat = v[i] / bias2;
                params[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

/// Scales all gradient groups so their joint L2 norm is at most
/// `max_norm`; returns the pre-clip norm.
pub fn clip_global_norm(grads: &mut [&mut [f64]], max_norm: f64) -> f64 {
    let norm: f64 = grads.iter().map(|g| g.iter().map(|x| x * x).sum::<f64>()).sum::<f64>().sqrt();
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        for g in grads.iter_mut() {
            for x in g.iter_mut() {
                *x *= scale;
            }
        }
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradients_leave_params_untouched() {
        let mut state = AdamState::new(AdamConfig::default(), &[3]);
        let mut p = vec![1.0, -2.0, 0.5];
        let g = vec![0.0; 3];
        for _ in 0..5 {
            state.step(&mut [("p", &mut p, &g)]).unwrap();
        }
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
        assert_eq!(state.step_count(), 5);
    }

    #[test]
    fn first_step_moves_by_roughly_lr() {
        // With g=1 and zero moments: m̂ = v̂ = 1, so the step is lr/(1+ε).
        let mut state = AdamState::new(AdamConfig::with_lr(0.1), &[1]);
        let mut p = vec![1.0];
        state.step(&mut [("theta", &mut p, &[1.0])]).unwrap();
        assert!((p[0] - 0.9).abs() < 1e-8, "got {}", p[0]);
    }

    #[test]
    fn identical_calls_identical_results() {
        let run = || {
            let mut state = AdamState::new(AdamConfig::default(), &[2]);
            let mut p = vec![0.3, -0.7];
            for step in 1..=10 {
                let g = vec![0.1 * step as f64, -0.05];
                state.step(&mut [("p", &mut p, &g)]).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn non_finite_gradient_names_parameter() {
        let mut state = AdamState::new(AdamConfig::default(), &[2, 1]);
        let mut a = vec![0.0, 0.0];
        let mut b = vec![0.0];
        let ga = vec![0.0, 0.0];
        let gb = vec![f64::NAN];
        let err = state.step(&mut [("w_a", &mut a, &ga), ("w_b", &mut b, &gb)]).unwrap_err();
        assert!(err.to_string().contains("w_b"), "{err}");
    }

    #[test]
    fn clip_rescales_only_above_threshold() {
        let mut a = vec![3.0, 4.0]; // norm 5
        let norm = clip_global_norm(&mut [&mut a], 10.0);
        assert_eq!(norm, 5.0);
        assert_eq!(a, vec![3.0, 4.0]);
        let norm = clip_global_norm(&mut [&mut a], 1.0);
        assert_eq!(norm, 5.0);
        let clipped: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((clipped - 1.0).abs() < 1e-12);
    }
}
