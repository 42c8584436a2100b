//! Model math: forward recurrence, cross-entropy loss, and BPTT.
//!
//! The recurrence is
//!
//! ```text
//! h_t = tanh(W_hx x_t + W_hh h_{t-1} + b_h)      h_0 trainable
//! y_t = sigmoid(W_yh h_t + b_y)                  elementwise
//! ```
//!
//! with `x_t` the one-hot of `input_index` (dimension 2S). The training
//! objective is mean binary cross-entropy of `y_t[target_skill]` against
//! the next answer's correctness. Because `x_t` is one-hot and the loss
//! touches a single readout row per step, the hot loops index columns and
//! rows directly instead of materializing one-hots.

use serde::{Deserialize, Serialize};

use crate::data::EncodedStep;
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};

const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DktParams {
    /// hidden x 2S input weights.
    pub w_hx: Matrix,
    /// hidden x hidden recurrent weights.
    pub w_hh: Matrix,
    /// S x hidden readout weights.
    pub w_yh: Matrix,
    pub b_h: Vec<f64>,
    pub b_y: Vec<f64>,
    pub h_0: Vec<f64>,
}

/// Gradients, same shapes as [`DktParams`].
#[derive(Debug, Clone)]
pub struct DktGrads {
    pub w_hx: Matrix,
    pub w_hh: Matrix,
    pub w_yh: Matrix,
    pub b_h: Vec<f64>,
    pub b_y: Vec<f64>,
    pub h_0: Vec<f64>,
}

/// Probability for the next question's skill paired with what actually
/// happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRecord {
    pub probability: f64,
    pub label: u8,
}

impl DktParams {
    /// Scaled-uniform initialization (±1/√fan_in), zero biases and zero
    /// initial state.
    pub fn init(hidden_size: usize, num_skills: usize, rng: &mut Rng) -> Self {
        let input_dim = 2 * num_skills;
        DktParams {
            w_hx: Matrix::uniform(hidden_size, input_dim, 1.0 / (input_dim as f64).sqrt(), rng),
            w_hh: Matrix::uniform(hidden_size, hidden_size, 1.0 / (hidden_size as f64).sqrt(), rng),
            w_yh: Matrix::uniform(num_skills, hidden_size, 1.0 / (hidden_size as f64).sqrt(), rng),
            b_h: vec![0.0; hidden_size],
            b_y: vec![0.0; num_skills],
            h_0: vec![0.0; hidden_size],
        }
    }

    pub fn zeros(hidden_size: usize, num_skills: usize) -> Self {
        DktParams {
            w_hx: Matrix::zeros(hidden_size, 2 * num_skills),
            w_hh: Matrix::zeros(hidden_size, hidden_size),
            w_yh: Matrix::zeros(num_skills, hidden_size),
            b_h: vec![0.0; hidden_size],
            b_y: vec![0.0; num_skills],
            h_0: vec![0.0; hidden_size],
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.w_hh.rows()
    }

    pub fn num_skills(&self) -> usize {
        self.w_yh.rows()
    }

    pub fn zero_grads(&self) -> DktGrads {
        DktGrads {
            w_hx: Matrix::zeros(self.w_hx.rows(), self.w_hx.cols()),
            w_hh: Matrix::zeros(self.w_hh.rows(), self.w_hh.cols()),
            w_yh: Matrix::zeros(self.w_yh.rows(), self.w_yh.cols()),
            b_h: vec![0.0; self.b_h.len()],
            b_y: vec![0.0; self.b_y.len()],
            h_0: vec![0.0; self.h_0.len()],
        }
    }

    /// Flattens into the six parameter groups, in a fixed order shared with
    /// [`DktParams::from_groups`] and the optimizer wiring.
    pub fn to_groups(&self) -> Vec<Vec<f64>> {
        vec![
            self.w_hx.as_slice().to_vec(),
            self.w_hh.as_slice().to_vec(),
            self.w_yh.as_slice().to_vec(),
            self.b_h.clone(),
            self.b_y.clone(),
            self.h_0.clone(),
        ]
    }

    pub fn from_groups(groups: &[Vec<f64>], hidden_size: usize, num_skills: usize) -> Result<Self> {
        if groups.len() != 6 {
            return Err(Error::shape("6 parameter groups", format!("{}", groups.len())));
        }
        Ok(DktParams {
            w_hx: Matrix::from_vec(hidden_size, 2 * num_skills, groups[0].clone())?,
            w_hh: Matrix::from_vec(hidden_size, hidden_size, groups[1].clone())?,
            w_yh: Matrix::from_vec(num_skills, hidden_size, groups[2].clone())?,
            b_h: groups[3].clone(),
            b_y: groups[4].clone(),
            h_0: groups[5].clone(),
        })
    }

    fn check_step(&self, step: &EncodedStep) -> Result<()> {
        if step.input_index >= self.w_hx.cols() || step.target_skill >= self.w_yh.rows() {
            return Err(Error::Model(format!(
                "step (input {}, target {}) out of range for params with 2S = {} and S = {}",
                step.input_index,
                step.target_skill,
                self.w_hx.cols(),
                self.w_yh.rows()
            )));
        }
        Ok(())
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Hidden states and target-entry probabilities for one window; the
/// minimum the backward pass needs.
struct WindowTrace {
    /// h_t for t = 0..n (index 0 is h_0 itself).
    hidden: Vec<Vec<f64>>,
    /// sigmoid(W_yh[target] · h_t + b_y[target]) per step.
    probs: Vec<f64>,
}

fn forward_trace(params: &DktParams, steps: &[EncodedStep]) -> Result<WindowTrace> {
    let hidden_size = params.hidden_size();
    let mut hidden = Vec::with_capacity(steps.len() + 1);
    hidden.push(params.h_0.clone());
    let mut probs = Vec::with_capacity(steps.len());
    for step in steps {
        params.check_step(step)?;
        let prev = hidden.last().expect("seeded with h_0");
        let mut pre = params.w_hh.matvec(prev)?;
        for (r, p) in pre.iter_mut().enumerate() {
            *p += params.w_hx.get(r, step.input_index) + params.b_h[r];
        }
        let h: Vec<f64> = pre.iter().map(|z| z.tanh()).collect();
        let row = params.w_yh.row(step.target_skill);
        let z: f64 = row.iter().zip(&h).map(|(w, hi)| w * hi).sum::<f64>() + params.b_y[step.target_skill];
        probs.push(sigmoid(z));
        hidden.push(h);
        let _ = hidden_size;
    }
    Ok(WindowTrace { hidden, probs })
}

/// Full forward pass: one `(y_t, h_t)` pair per step, `y_t` holding a
/// probability for every skill.
pub fn dkt_forward(params: &DktParams, steps: &[EncodedStep]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("dkt_forward needs at least one step".into()));
    }
    let mut out = Vec::with_capacity(steps.len());
    let mut prev = params.h_0.clone();
    for step in steps {
        params.check_step(step)?;
        let mut pre = params.w_hh.matvec(&prev)?;
        for (r, p) in pre.iter_mut().enumerate() {
            *p += params.w_hx.get(r, step.input_index) + params.b_h[r];
        }
        let h: Vec<f64> = pre.iter().map(|z| z.tanh()).collect();
        let mut y = params.w_yh.matvec(&h)?;
        for (yi, bi) in y.iter_mut().zip(&params.b_y) {
            *yi = sigmoid(*yi + bi);
        }
        out.push((y, h.clone()));
        prev = h;
    }
    Ok(out)
}

/// Mean binary cross-entropy over prediction records, with probabilities
/// clamped away from 0 and 1. Kahan-summed so the value does not depend on
/// record order.
pub fn dkt_loss(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no prediction records to score".into()));
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for r in records {
        let p = r.probability.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        let term = if r.label == 1 { -p.ln() } else { -(1.0 - p).ln() };
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum / records.len() as f64)
}

/// Loss and exact gradients over a batch of windows; the loss is the mean
/// cross-entropy over all records in the batch. Each window restarts from
/// `h_0`, and `h_0` collects gradient from every window.
pub fn dkt_loss_and_grads<W: AsRef<[EncodedStep]>>(params: &DktParams, windows: &[W]) -> Result<(f64, DktGrads)> {
    let total_records: usize = windows.iter().map(|w| w.as_ref().len()).sum();
    if total_records == 0 {
        return Err(Error::InvalidArgument("no steps in batch".into()));
    }
    let scale = 1.0 / total_records as f64;
    let hidden_size = params.hidden_size();
    let mut grads = params.zero_grads();
    let mut records = Vec::with_capacity(total_records);

    for window in windows {
        let window = window.as_ref();
        if window.is_empty() {
            continue;
        }
        let trace = forward_trace(params, window)?;
        for (p, step) in trace.probs.iter().zip(window) {
            records.push(PredictionRecord { probability: *p, label: step.target_correct });
        }
        // carry = W_hh^T da_{t+1}, the gradient arriving at h_t from later steps
        let mut carry = vec![0.0; hidden_size];
        for t in (0..window.len()).rev() {
            let step = &window[t];
            let h_t = &trace.hidden[t + 1];
            let h_prev = &trace.hidden[t];
            let delta_z = (trace.probs[t] - step.target_correct as f64) * scale;

            grads.b_y[step.target_skill] += delta_z;
            let w_row = params.w_yh.row(step.target_skill);
            let g_row = grads.w_yh.row_mut(step.target_skill);
            let mut dh = carry;
            for i in 0..hidden_size {
                g_row[i] += delta_z * h_t[i];
                dh[i] += delta_z * w_row[i];
            }
            let da: Vec<f64> = dh.iter().zip(h_t).map(|(d, h)| d * (1.0 - h * h)).collect();
            for (r, a) in da.iter().enumerate() {
                grads.w_hx.row_mut(r)[step.input_index] += a;
                grads.b_h[r] += a;
            }
            grads.w_hh.add_outer(&da, h_prev, 1.0);
            carry = params.w_hh.matvec_transpose(&da)?;
        }
        for (g, c) in grads.h_0.iter_mut().zip(&carry) {
            *g += c;
        }
    }
    let loss = dkt_loss(&records)?;
    Ok((loss, grads))
}

/// Gradients of the batch loss for all six parameter groups.
pub fn dkt_backward<W: AsRef<[EncodedStep]>>(params: &DktParams, windows: &[W]) -> Result<DktGrads> {
    dkt_loss_and_grads(params, windows).map(|(_, g)| g)
}

impl DktGrads {
    pub fn to_groups(&self) -> Vec<Vec<f64>> {
        vec![
            self.w_hx.as_slice().to_vec(),
            self.w_hh.as_slice().to_vec(),
            self.w_yh.as_slice().to_vec(),
            self.b_h.clone(),
            self.b_y.clone(),
            self.h_0.clone(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grad_check;

    fn step(input_index: usize, target_skill: usize, target_correct: u8) -> EncodedStep {
        EncodedStep { input_index, target_skill, target_correct }
    }

    fn random_steps(len: usize, num_skills: usize, rng: &mut Rng) -> Vec<EncodedStep> {
        (0..len)
            .map(|_| step(rng.index(2 * num_skills), rng.index(num_skills), rng.index(2) as u8))
            .collect()
    }

    #[test]
    fn zero_params_give_half_everywhere() {
        let params = DktParams::zeros(4, 3);
        let out = dkt_forward(&params, &[step(0, 1, 1), step(5, 2, 0)]).unwrap();
        for (y, h) in &out {
            assert!(h.iter().all(|v| *v == 0.0));
            assert!(y.iter().all(|v| *v == 0.5));
        }
    }

    #[test]
    fn no_recurrence_means_memoryless() {
        let mut rng = Rng::new(8);
        let mut params = DktParams::init(5, 4, &mut rng);
        params.w_hh = Matrix::zeros(5, 5);
        let steps = random_steps(6, 4, &mut rng);
        let full = dkt_forward(&params, &steps).unwrap();
        let mut permuted = steps.clone();
        permuted.swap(0, 2); // earlier steps only
        let swapped = dkt_forward(&params, &permuted).unwrap();
        // position 4 sees the same input either way, so y must match
        assert_eq!(full[4].0, swapped[4].0);
    }

    #[test]
    fn forward_matches_straight_line_oracle() {
        // Independent recomputation with nothing shared but the parameter
        // values: explicit one-hot, explicit matrix products.
        let mut rng = Rng::new(21);
        let hidden = 4;
        let s = 3;
        let params = DktParams::init(hidden, s, &mut rng);
        let steps = random_steps(3, s, &mut rng);
        let got = dkt_forward(&params, &steps).unwrap();

        let mut h_prev = params.h_0.clone();
        for (t, stp) in steps.iter().enumerate() {
            let mut x = vec![0.0; 2 * s];
            x[stp.input_index] = 1.0;
            let mut h = vec![0.0; hidden];
            #[allow(clippy::needless_range_loop)]
            for r in 0..hidden {
                let mut z = params.b_h[r];
                for c in 0..2 * s {
                    z += params.w_hx.get(r, c) * x[c];
                }
                for c in 0..hidden {
                    z += params.w_hh.get(r, c) * h_prev[c];
                }
                h[r] = z.tanh();
            }
            let mut y = vec![0.0; s];
            #[allow(clippy::needless_range_loop)]
            for k in 0..s {
                let mut z = params.b_y[k];
                for c in 0..hidden {
                    z += params.w_yh.get(k, c) * h[c];
                }
                y[k] = 1.0 / (1.0 + (-z).exp());
            }
            for i in 0..hidden {
                assert!((got[t].1[i] - h[i]).abs() < 1e-12);
            }
            for k in 0..s {
                assert!((got[t].0[k] - y[k]).abs() < 1e-12);
            }
            h_prev = h;
        }
    }

    #[test]
    fn loss_of_uninformative_predictor_is_ln2() {
        let records = vec![PredictionRecord { probability: 0.5, label: 1 }; 10];
        let loss = dkt_loss(&records).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn loss_of_perfect_predictor_is_tiny() {
        let records = vec![
            PredictionRecord { probability: 1.0, label: 1 },
            PredictionRecord { probability: 0.0, label: 0 },
        ];
        let loss = dkt_loss(&records).unwrap();
        assert!(loss < 1.6e-5, "loss {loss}");
    }

    #[test]
    fn loss_hand_computed() {
        let records = vec![
            PredictionRecord { probability: 0.9, label: 1 },
            PredictionRecord { probability: 0.2, label: 0 },
        ];
        let expected = -(0.9f64.ln() + 0.8f64.ln()) / 2.0;
        assert!((dkt_loss(&records).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.1643).abs() < 1e-4);
    }

    #[test]
    fn loss_is_permutation_invariant() {
        let mut rng = Rng::new(3);
        let mut records: Vec<PredictionRecord> = (0..500)
            .map(|_| PredictionRecord { probability: rng.uniform_range(0.01, 0.99), label: rng.index(2) as u8 })
            .collect();
        let a = dkt_loss(&records).unwrap();
        rng.shuffle(&mut records);
        let b = dkt_loss(&records).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn empty_records_error() {
        assert!(dkt_loss(&[]).is_err());
    }

    #[test]
    fn bptt_passes_grad_check_small() {
        let mut rng = Rng::new(17);
        let params = DktParams::init(4, 3, &mut rng);
        let windows = vec![random_steps(3, 3, &mut rng)];
        let (_, grads) = dkt_loss_and_grads(&params, &windows).unwrap();
        let loss_fn = |groups: &[Vec<f64>]| {
            let p = DktParams::from_groups(groups, 4, 3).unwrap();
            dkt_loss_and_grads(&p, &windows).unwrap().0
        };
        let err = grad_check(loss_fn, &params.to_groups(), &grads.to_groups(), 1e-5);
        assert!(err < 1e-4, "max rel error {err}");
    }

    #[test]
    fn single_step_w_hh_gradient_runs_through_h0_only() {
        let mut rng = Rng::new(33);
        let mut params = DktParams::init(3, 2, &mut rng);
        params.h_0 = vec![0.4, -0.2, 0.9];
        let windows = vec![vec![step(1, 0, 1)]];
        let grads = dkt_backward(&params, &windows).unwrap();
        // dW_hh = da ⊗ h_0, so columns must be proportional to h_0 entries
        for r in 0..3 {
            let row = grads.w_hh.row(r);
            for c in 0..3 {
                let expected_ratio = params.h_0[c] / params.h_0[0];
                if row[0].abs() > 1e-14 {
                    assert!((row[c] / row[0] - expected_ratio).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn doubling_the_loss_doubles_every_gradient() {
        let mut rng = Rng::new(51);
        let params = DktParams::init(4, 3, &mut rng);
        let windows = vec![random_steps(4, 3, &mut rng)];
        let grads = dkt_backward(&params, &windows).unwrap();
        let doubled: Vec<Vec<f64>> = grads.to_groups().iter().map(|g| g.iter().map(|x| 2.0 * x).collect()).collect();
        let loss_fn = |groups: &[Vec<f64>]| {
            let p = DktParams::from_groups(groups, 4, 3).unwrap();
            2.0 * dkt_loss_and_grads(&p, &windows).unwrap().0
        };
        let err = grad_check(loss_fn, &params.to_groups(), &doubled, 1e-5);
        assert!(err < 1e-4, "max rel error {err}");
    }
}
