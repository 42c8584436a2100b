//! Mini-batch training with validation-based early stopping.

use serde::{Deserialize, Serialize};

use crate::data::{encode_sequence, EncodedStep, StudentSequence, Vocab, DEFAULT_MAX_LEN};
use crate::dkt::model::{dkt_loss_and_grads, DktParams, PredictionRecord};
use crate::error::{Error, Result};
use crate::eval::auc;
use crate::numerics::{clip_global_norm, AdamConfig, AdamState, Rng};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DktConfig {
    pub hidden_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Windows per optimizer step.
    pub batch_size: usize,
    pub max_grad_norm: f64,
    pub seed: u64,
    /// Epochs without validation improvement tolerated before stopping.
    pub patience: usize,
    /// Interactions per window; longer sequences chunk and restart `h_0`.
    pub max_len: usize,
}

impl Default for DktConfig {
    fn default() -> Self {
        DktConfig {
            hidden_size: 64,
            learning_rate: 1e-3,
            epochs: 100,
            batch_size: 32,
            max_grad_norm: 5.0,
            seed: 0,
            patience: 5,
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_auc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_valid_auc: f64,
    pub early_stopped: bool,
    /// Set when the validation split had a single label class and AUC was
    /// pinned to 50.
    pub degenerate_validation: bool,
}

fn encode_all(seqs: &[StudentSequence], vocab: &Vocab, max_len: usize) -> Result<Vec<Vec<EncodedStep>>> {
    let mut windows = Vec::new();
    for seq in seqs {
        windows.extend(encode_sequence(seq, vocab, max_len)?);
    }
    Ok(windows)
}

/// Trains from scratch and returns the parameters of the best validation
/// epoch together with the full log. Deterministic given config and data.
pub fn dkt_train(
    train_seqs: &[StudentSequence],
    valid_seqs: &[StudentSequence],
    vocab: &Vocab,
    config: &DktConfig,
) -> Result<(DktParams, TrainLog)> {
    if config.hidden_size == 0 || config.epochs == 0 {
        return Err(Error::InvalidArgument("hidden_size and epochs must be at least 1".into()));
    }
    if train_seqs.is_empty() {
        return Err(Error::Training("no training sequences".into()));
    }
    let train_windows = encode_all(train_seqs, vocab, config.max_len)?;
    if train_windows.iter().all(|w| w.is_empty()) {
        return Err(Error::Training("no trainable steps: every training sequence is shorter than 2".into()));
    }
    let valid_windows = encode_all(valid_seqs, vocab, config.max_len)?;
    if valid_windows.iter().all(|w| w.is_empty()) {
        return Err(Error::Training("no validation predictions possible: every validation sequence is shorter than 2".into()));
    }

    let num_skills = vocab.num_skills();
    let mut rng = Rng::new(config.seed);
    let mut params = DktParams::init(config.hidden_size, num_skills, &mut rng);
    let group_sizes: Vec<usize> = params.to_groups().iter().map(|g| g.len()).collect();
    let mut adam = AdamState::new(AdamConfig::with_lr(config.learning_rate), &group_sizes);

    let mut order: Vec<usize> = (0..train_windows.len()).collect();
    let mut log = TrainLog {
        epochs: Vec::new(),
        best_epoch: 0,
        best_valid_auc: f64::NEG_INFINITY,
        early_stopped: false,
        degenerate_validation: false,
    };
    let mut best_params = params.clone();
    let mut epochs_since_best = 0usize;

    for epoch in 1..=config.epochs {
        rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut record_sum = 0usize;
        for chunk in order.chunks(config.batch_size.max(1)) {
            let batch: Vec<&[EncodedStep]> = chunk.iter().map(|&i| train_windows[i].as_slice()).collect();
            let n_records: usize = batch.iter().map(|w| w.len()).sum();
            if n_records == 0 {
                continue;
            }
            let (loss, grads) = dkt_loss_and_grads(&params, &batch)?;
            let mut grad_groups = grads.to_groups();
            {
                let mut views: Vec<&mut [f64]> = grad_groups.iter_mut().map(|g| g.as_mut_slice()).collect();
                clip_global_norm(&mut views, config.max_grad_norm);
            }
            let mut param_groups = params.to_groups();
            {
                let mut step_groups: Vec<(&str, &mut [f64], &[f64])> = param_groups
                    .iter_mut()
                    .zip(grad_groups.iter())
                    .zip(["w_hx", "w_hh", "w_yh", "b_h", "b_y", "h_0"])
                    .map(|((p, g), name)| (name, p.as_mut_slice(), g.as_slice()))
                    .collect();
                adam.step(&mut step_groups)?;
            }
            params = DktParams::from_groups(&param_groups, config.hidden_size, num_skills)?;
            loss_sum += loss * n_records as f64;
            record_sum += n_records;
        }

        let valid_records = predict_windows(&params, &valid_windows)?;
        let valid_auc = match auc(&valid_records) {
            Ok(v) => v,
            Err(_) => {
                log.degenerate_validation = true;
                50.0
            }
        };
        log.epochs.push(EpochStats { epoch, train_loss: loss_sum / record_sum.max(1) as f64, valid_auc });

        if valid_auc > log.best_valid_auc {
            log.best_valid_auc = valid_auc;
            log.best_epoch = epoch;
            best_params = params.clone();
            epochs_since_best = 0;
        } else {
            epochs_since_best += 1;
            if epochs_since_best > config.patience {
                log.early_stopped = true;
                break;
            }
        }
    }
    Ok((best_params, log))
}

fn predict_windows(params: &DktParams, windows: &[Vec<EncodedStep>]) -> Result<Vec<PredictionRecord>> {
    let mut records = Vec::new();
    for window in windows {
        if window.is_empty() {
            continue;
        }
        let mut prev = params.h_0.clone();
        for step in window {
            let mut pre = params.w_hh.matvec(&prev)?;
            for (r, p) in pre.iter_mut().enumerate() {
                *p += params.w_hx.get(r, step.input_index) + params.b_h[r];
            }
            let h: Vec<f64> = pre.iter().map(|z| z.tanh()).collect();
            let row = params.w_yh.row(step.target_skill);
            let z: f64 = row.iter().zip(&h).map(|(w, hi)| w * hi).sum::<f64>() + params.b_y[step.target_skill];
            let probability = 1.0 / (1.0 + (-z).exp());
            records.push(PredictionRecord { probability, label: step.target_correct });
            prev = h;
        }
    }
    Ok(records)
}

/// Next-answer probabilities for every encodable step, students visited in
/// sorted user-id order so output order is reproducible.
pub fn dkt_predict(
    params: &DktParams,
    seqs: &[StudentSequence],
    vocab: &Vocab,
    max_len: usize,
) -> Result<Vec<PredictionRecord>> {
    if vocab.num_skills() != params.num_skills() {
        return Err(Error::Model(format!(
            "vocabulary has {} skills but params were trained with {}",
            vocab.num_skills(),
            params.num_skills()
        )));
    }
    let mut sorted: Vec<&StudentSequence> = seqs.iter().collect();
    sorted.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    let mut records = Vec::new();
    for seq in sorted {
        let windows = encode_sequence(seq, vocab, max_len)?;
        records.extend(predict_windows(params, &windows)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_sequences, simulate_students, split_by_student, MasteryParams, SplitSpec};

    fn noiseless_corpus() -> (Vec<StudentSequence>, Vec<StudentSequence>, Vocab) {
        // Deterministic responses given latent mastery: a response is
        // correct exactly when the skill has been learned, so history
        // nearly determines the next answer (low p_init keeps first
        // encounters predictable too).
        let params: Vec<MasteryParams> = (0..3)
            .map(|_| MasteryParams { p_init: 0.05, p_learn: 0.3, p_guess: 0.0, p_slip: 0.0 })
            .collect();
        let rows = simulate_students(200, 3, &params, 60, 404).unwrap();
        let spec = SplitSpec { train_frac: 0.5, valid_frac: 0.25, test_frac: 0.25, seed: 1 };
        let (train, valid, _) = split_by_student(&rows, &spec).unwrap();
        let vocab = Vocab::build(&train);
        (build_sequences(&train), build_sequences(&valid), vocab)
    }

    #[test]
    fn learns_noiseless_mastery_to_high_auc() {
        let (train, valid, vocab) = noiseless_corpus();
        let config = DktConfig {
            hidden_size: 32,
            learning_rate: 5e-3,
            epochs: 20,
            batch_size: 4,
            seed: 5,
            patience: 20,
            ..DktConfig::default()
        };
        let (_, log) = dkt_train(&train, &valid, &vocab, &config).unwrap();
        assert!(log.best_valid_auc >= 95.0, "best valid AUC {}", log.best_valid_auc);
    }

    #[test]
    fn training_is_deterministic() {
        let (train, valid, vocab) = noiseless_corpus();
        let config = DktConfig { hidden_size: 8, epochs: 4, batch_size: 8, seed: 9, ..DktConfig::default() };
        let (params_a, log_a) = dkt_train(&train, &valid, &vocab, &config).unwrap();
        let (params_b, log_b) = dkt_train(&train, &valid, &vocab, &config).unwrap();
        assert_eq!(log_a, log_b);
        assert_eq!(params_a.w_hh.as_slice(), params_b.w_hh.as_slice());
    }

    #[test]
    fn zero_patience_stops_one_epoch_past_best() {
        let (train, valid, vocab) = noiseless_corpus();
        let config = DktConfig { hidden_size: 8, epochs: 50, batch_size: 8, seed: 2, patience: 0, ..DktConfig::default() };
        let (_, log) = dkt_train(&train, &valid, &vocab, &config).unwrap();
        if log.early_stopped {
            assert_eq!(log.epochs.len(), log.best_epoch + 1);
        }
    }

    #[test]
    fn unsplittable_validation_is_an_error() {
        let (train, _, vocab) = noiseless_corpus();
        let valid = vec![StudentSequence { user_id: "v".into(), steps: vec![("skill000".into(), 1)] }];
        let err = dkt_train(&train, &valid, &vocab, &DktConfig::default()).unwrap_err();
        assert!(err.to_string().contains("validation"), "{err}");
    }

    #[test]
    fn zero_params_predict_half() {
        let vocab = Vocab::from_parts(vec!["a".into(), "b".into()], vec!["u".into()]);
        let params = DktParams::zeros(6, vocab.num_skills());
        let seqs = vec![StudentSequence { user_id: "u".into(), steps: vec![("a".into(), 1), ("b".into(), 0), ("a".into(), 0)] }];
        let records = dkt_predict(&params, &seqs, &vocab, 100).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.probability == 0.5));
    }

    #[test]
    fn record_counts_match_sequence_lengths() {
        let mut rng = Rng::new(12);
        for _ in 0..20 {
            let n_skills = 2 + rng.index(4);
            let skills: Vec<String> = (0..n_skills).map(|i| format!("s{i}")).collect();
            let vocab = Vocab::from_parts(skills.clone(), vec![]);
            let params = DktParams::zeros(3, vocab.num_skills());
            let mut seqs = Vec::new();
            let mut expected = 0usize;
            for u in 0..1 + rng.index(6) {
                let len = 1 + rng.index(9);
                if len >= 2 {
                    expected += len - 1;
                }
                let steps: Vec<(String, u8)> =
                    (0..len).map(|_| (skills[rng.index(n_skills)].clone(), rng.index(2) as u8)).collect();
                seqs.push(StudentSequence { user_id: format!("u{u}"), steps });
            }
            let records = dkt_predict(&params, &seqs, &vocab, 100).unwrap();
            assert_eq!(records.len(), expected);
        }
    }

    #[test]
    fn vocabulary_mismatch_is_model_error() {
        let vocab = Vocab::from_parts(vec!["a".into()], vec![]);
        let params = DktParams::zeros(4, 7);
        let seqs = vec![StudentSequence { user_id: "u".into(), steps: vec![("a".into(), 1), ("a".into(), 1)] }];
        assert!(dkt_predict(&params, &seqs, &vocab, 50).is_err());
    }
}
