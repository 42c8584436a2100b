use serde::{Deserialize, Serialize};

/// One student–question event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub user_id: String,
    pub skill_id: String,
    /// 0 or 1.
    pub correct: u8,
    /// Time spent on the problem, milliseconds. Carried through generation
    /// and augmentation but not part of the model input encoding.
    pub overlap_time: f64,
}

/// A student's interactions in log order.
#[derive(Debug, Clone, PartialEq)]
pub struct StudentSequence {
    pub user_id: String,
    /// `(skill_id, correct)` per step.
    pub steps: Vec<(String, u8)>,
}
