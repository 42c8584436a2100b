//! Grouping interactions into per-student sequences and encoding them for
//! the recurrent model.

use std::collections::HashMap;

use crate::data::{Interaction, StudentSequence, Vocab};
use crate::error::{Error, Result};

/// Default cap on interactions per training window; longer sequences are
/// chunked and the hidden state restarts at each chunk.
pub const DEFAULT_MAX_LEN: usize = 200;

/// One supervised step: the current interaction as input, the next
/// interaction's outcome as target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodedStep {
    /// `skill + S * correct`, in `[0, 2S)`.
    pub input_index: usize,
    /// Skill of the next interaction, in `[0, S)`.
    pub target_skill: usize,
    /// Correctness of the next interaction.
    pub target_correct: u8,
}

/// Groups interactions by student, preserving each student's original log
/// order. Students with fewer than two interactions are dropped since they
/// have no next-step target.
pub fn build_sequences(interactions: &[Interaction]) -> Vec<StudentSequence> {
    let mut order: Vec<&str> = Vec::new();
    let mut grouped: HashMap<&str, Vec<(String, u8)>> = HashMap::new();
    for i in interactions {
        let entry = grouped.entry(&i.user_id).or_insert_with(|| {
            order.push(&i.user_id);
            Vec::new()
        });
        entry.push((i.skill_id.clone(), i.correct));
    }
    order
        .into_iter()
        .filter_map(|user| {
            let steps = grouped.remove(user)?;
            (steps.len() >= 2).then(|| StudentSequence { user_id: user.to_string(), steps })
        })
        .collect()
}

/// Encodes one sequence into supervised windows. Interactions are chunked
/// into consecutive non-overlapping windows of at most `max_len`; a window
/// with `w` interactions yields `w - 1` steps (a trailing single-interaction
/// window yields none).
pub fn encode_sequence(seq: &StudentSequence, vocab: &Vocab, max_len: usize) -> Result<Vec<Vec<EncodedStep>>> {
    let num_skills = vocab.num_skills();
    if max_len < 2 {
        return Err(Error::InvalidArgument(format!("max_len must be at least 2, got {max_len}")));
    }
    let mut windows = Vec::new();
    for chunk in seq.steps.chunks(max_len) {
        if chunk.len() < 2 {
            continue;
        }
        let mut steps = Vec::with_capacity(chunk.len() - 1);
        for pair in chunk.windows(2) {
            let (cur_skill, cur_correct) = (&pair[0].0, pair[0].1);
            let (next_skill, next_correct) = (&pair[1].0, pair[1].1);
            let cur = vocab.skill_index(cur_skill);
            let next = vocab.skill_index(next_skill);
            if cur >= num_skills || next >= num_skills {
                return Err(Error::Encoding(format!("skill index {} out of range for {num_skills} skills", cur.max(next))));
            }
            steps.push(EncodedStep {
                input_index: cur + num_skills * cur_correct as usize,
                target_skill: next,
                target_correct: next_correct,
            });
        }
        windows.push(steps);
    }
    Ok(windows)
}

/// `input_index` back to `(skill, correct)`.
pub fn decode_input_index(input_index: usize, num_skills: usize) -> (usize, u8) {
    (input_index % num_skills, (input_index / num_skills) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab_of(n: usize) -> Vocab {
        // n observed skills named s0..s{n-1}; vocab adds the unknown bucket.
        let skills: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        Vocab::from_parts(skills, vec!["u".into()])
    }

    fn seq(user: &str, steps: &[(usize, u8)]) -> StudentSequence {
        StudentSequence {
            user_id: user.into(),
            steps: steps.iter().map(|(s, c)| (format!("s{s}"), *c)).collect(),
        }
    }

    #[test]
    fn single_group_preserves_order() {
        let rows: Vec<Interaction> = ["a", "b", "c"]
            .iter()
            .map(|s| Interaction { user_id: "u1".into(), skill_id: (*s).into(), correct: 1, overlap_time: 0.0 })
            .collect();
        let seqs = build_sequences(&rows);
        assert_eq!(seqs.len(), 1);
        let skills: Vec<&str> = seqs[0].steps.iter().map(|(s, _)| s.as_str()).collect();
        assert_eq!(skills, vec!["a", "b", "c"]);
    }

    #[test]
    fn single_interaction_student_excluded() {
        let rows = vec![Interaction { user_id: "lonely".into(), skill_id: "a".into(), correct: 0, overlap_time: 1.0 }];
        assert!(build_sequences(&rows).is_empty());
    }

    #[test]
    fn interleaved_users_keep_per_user_log_order() {
        // Oracle: stable grouping done by hand.
        let mut rows = Vec::new();
        for step in 0..6 {
            rows.push(Interaction {
                user_id: format!("u{}", step % 2),
                skill_id: format!("s{step}"),
                correct: 0,
                overlap_time: 0.0,
            });
        }
        let seqs = build_sequences(&rows);
        assert_eq!(seqs.len(), 2);
        let of = |user: &str| -> Vec<String> {
            seqs.iter().find(|s| s.user_id == user).unwrap().steps.iter().map(|(s, _)| s.clone()).collect()
        };
        assert_eq!(of("u0"), vec!["s0", "s2", "s4"]);
        assert_eq!(of("u1"), vec!["s1", "s3", "s5"]);
    }

    #[test]
    fn length_one_sequence_encodes_to_nothing() {
        let vocab = vocab_of(4); // S = 5 with unknown
        let windows = encode_sequence(&seq("u", &[(2, 1)]), &vocab, 100).unwrap();
        assert!(windows.is_empty());
    }

    #[test]
    fn index_formula() {
        let vocab = vocab_of(4); // S = 5
        let windows = encode_sequence(&seq("u", &[(0, 1), (3, 0)]), &vocab, 100).unwrap();
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0], vec![EncodedStep { input_index: 0 + 5 * 1, target_skill: 3, target_correct: 0 }]);
    }

    #[test]
    fn chunking_arithmetic() {
        let steps: Vec<(usize, u8)> = (0..250).map(|i| (i % 3, (i % 2) as u8)).collect();
        let vocab = vocab_of(3);
        let windows = encode_sequence(&seq("u", &steps), &vocab, 100).unwrap();
        // interaction chunks of 100, 100, 50 -> encoded windows of 99, 99, 49
        let sizes: Vec<usize> = windows.iter().map(|w| w.len()).collect();
        assert_eq!(sizes, vec![99, 99, 49]);
    }

    #[test]
    fn encoding_round_trips() {
        let num_skills = 7;
        for skill in 0..num_skills {
            for correct in 0..2u8 {
                let idx = skill + num_skills * correct as usize;
                assert_eq!(decode_input_index(idx, num_skills), (skill, correct));
            }
        }
    }

    #[test]
    fn unseen_skill_goes_to_reserved_bucket() {
        let vocab = vocab_of(2); // S = 3, unknown = 2
        let s = StudentSequence { user_id: "u".into(), steps: vec![("s0".into(), 1), ("mystery".into(), 0)] };
        let windows = encode_sequence(&s, &vocab, 10).unwrap();
        assert_eq!(windows[0][0].target_skill, vocab.unknown_skill());
    }
}
