//! Two-state mastery simulator.
//!
//! Serves as a ground-truth fixture: the bundled corpus below lets the full
//! pipeline run without any external dataset. Each student holds a latent
//! learned/unlearned state per skill; responses are guesses when unlearned
//! and slips when learned, so a sequence model has real signal to recover.

use crate::data::Interaction;
use crate::error::{Error, Result};
use crate::numerics::Rng;

/// Per-skill mastery dynamics.
#[derive(Debug, Clone, Copy)]
pub struct MasteryParams {
    /// Probability the skill starts learned.
    pub p_init: f64,
    /// Per-practice probability of transitioning unlearned -> learned.
    pub p_learn: f64,
    /// P(correct | unlearned).
    pub p_guess: f64,
    /// P(incorrect | learned).
    pub p_slip: f64,
}

impl MasteryParams {
    fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_init", self.p_init),
            ("p_learn", self.p_learn),
            ("p_guess", self.p_guess),
            ("p_slip", self.p_slip),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Generates interaction logs for `num_students` students, each answering
/// `steps_per_student` uniformly chosen skills. Overlap times are
/// log-normal. Deterministic given the seed.
pub fn simulate_students(
    num_students: usize,
    num_skills: usize,
    mastery_params: &[MasteryParams],
    steps_per_student: usize,
    seed: u64,
) -> Result<Vec<Interaction>> {
    if mastery_params.len() != num_skills {
        return Err(Error::InvalidArgument(format!(
            "expected {num_skills} mastery parameter sets, got {}",
            mastery_params.len()
        )));
    }
    for p in mastery_params {
        p.validate()?;
    }
    let mut rng = Rng::new(seed);
    let mut out = Vec::with_capacity(num_students * steps_per_student);
    for student in 0..num_students {
        let user_id = format!("sim{student:05}");
        let mut learned: Vec<bool> = mastery_params.iter().map(|p| rng.flip(p.p_init)).collect();
        for _ in 0..steps_per_student {
            let skill = rng.index(num_skills);
            let p = &mastery_params[skill];
            let correct = if learned[skill] { !rng.flip(p.p_slip) } else { rng.flip(p.p_guess) };
            if !learned[skill] && rng.flip(p.p_learn) {
                learned[skill] = true;
            }
            // median ~30 s, heavy right tail, in milliseconds
            let overlap_time = (10.3 + 0.9 * rng.gaussian()).exp();
            out.push(Interaction {
                user_id: user_id.clone(),
                skill_id: format!("skill{skill:03}"),
                correct: correct as u8,
                overlap_time,
            });
        }
    }
    Ok(out)
}

pub const BUNDLED_NUM_STUDENTS: usize = 500;
pub const BUNDLED_NUM_SKILLS: usize = 20;
pub const BUNDLED_STEPS_PER_STUDENT: usize = 100;
pub const BUNDLED_SEED: u64 = 20_240_901;

/// The bundled desk-scale corpus: 500 students, 20 skills of varied
/// difficulty, 100 steps each. Regenerated on demand, byte-stable.
pub fn bundled_corpus() -> Vec<Interaction> {
    let mut rng = Rng::new(BUNDLED_SEED ^ 0xD1FF);
    let params: Vec<MasteryParams> = (0..BUNDLED_NUM_SKILLS)
        .map(|_| MasteryParams {
            p_init: rng.uniform_range(0.05, 0.65),
            p_learn: rng.uniform_range(0.02, 0.12),
            p_guess: rng.uniform_range(0.05, 0.55),
            p_slip: rng.uniform_range(0.02, 0.30),
        })
        .collect();
    simulate_students(BUNDLED_NUM_STUDENTS, BUNDLED_NUM_SKILLS, &params, BUNDLED_STEPS_PER_STUDENT, BUNDLED_SEED)
        .expect("bundled parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(p: MasteryParams, n: usize) -> Vec<MasteryParams> {
        vec![p; n]
    }

    #[test]
    fn deterministic_mastery_all_correct() {
        let params = flat(MasteryParams { p_init: 1.0, p_learn: 0.0, p_guess: 0.0, p_slip: 0.0 }, 3);
        let rows = simulate_students(5, 3, &params, 50, 7).unwrap();
        assert!(rows.iter().all(|r| r.correct == 1));
    }

    #[test]
    fn coin_flip_rate_near_half() {
        let params = flat(MasteryParams { p_init: 0.5, p_learn: 0.1, p_guess: 0.5, p_slip: 0.5 }, 4);
        let rows = simulate_students(100, 4, &params, 100, 13).unwrap();
        assert_eq!(rows.len(), 10_000);
        let rate = rows.iter().map(|r| r.correct as usize).sum::<usize>() as f64 / rows.len() as f64;
        assert!((rate - 0.5).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn same_seed_identical_corpus() {
        let params = flat(MasteryParams { p_init: 0.3, p_learn: 0.05, p_guess: 0.2, p_slip: 0.1 }, 2);
        let a = simulate_students(10, 2, &params, 20, 42).unwrap();
        let b = simulate_students(10, 2, &params, 20, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn static_mastery_rate_within_three_sigma() {
        // p_learn = 0 keeps mastery fixed, so the correct rate has the
        // closed form q + (1 - 2q) * p_init.
        let q = 0.2;
        let p_init = 0.4;
        let params = flat(MasteryParams { p_init, p_learn: 0.0, p_guess: q, p_slip: q }, 5);
        let rows = simulate_students(200, 5, &params, 100, 99).unwrap();
        let n = rows.len() as f64;
        let expected = q + (1.0 - 2.0 * q) * p_init;
        let rate = rows.iter().map(|r| r.correct as usize).sum::<usize>() as f64 / n;
        let sigma = (expected * (1.0 - expected) / n).sqrt();
        assert!((rate - expected).abs() < 3.0 * sigma + 0.01, "rate {rate} vs {expected}");
    }

    #[test]
    fn invalid_probability_rejected() {
        let params = flat(MasteryParams { p_init: 0.5, p_learn: 1.5, p_guess: 0.5, p_slip: 0.5 }, 1);
        assert!(simulate_students(1, 1, &params, 1, 0).is_err());
    }

    #[test]
    fn overlap_times_positive() {
        let params = flat(MasteryParams { p_init: 0.5, p_learn: 0.1, p_guess: 0.3, p_slip: 0.1 }, 2);
        let rows = simulate_students(5, 2, &params, 30, 3).unwrap();
        assert!(rows.iter().all(|r| r.overlap_time > 0.0));
    }

    #[test]
    fn bundled_corpus_shape() {
        let rows = bundled_corpus();
        assert_eq!(rows.len(), BUNDLED_NUM_STUDENTS * BUNDLED_STEPS_PER_STUDENT);
        let rows2 = bundled_corpus();
        assert_eq!(rows[0], rows2[0]);
        assert_eq!(rows[rows.len() - 1], rows2[rows2.len() - 1]);
    }
}
