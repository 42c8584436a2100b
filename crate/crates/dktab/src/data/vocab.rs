//! Skill and user vocabularies, built from the training split only.

use std::collections::BTreeSet;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::data::Interaction;

/// Index maps for skills and users. The skill table reserves one extra
/// bucket at index `num_skills() - 1` for skills never seen at build time,
/// so evaluation data with unknown skills cannot crash the model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocab {
    skills: Vec<String>,
    users: Vec<String>,
    #[serde(skip)]
    skill_index: HashMap<String, usize>,
    #[serde(skip)]
    user_index: HashMap<String, usize>,
}

impl Vocab {
    pub fn build(train: &[Interaction]) -> Vocab {
        let skills: Vec<String> = train.iter().map(|i| i.skill_id.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let users: Vec<String> = train.iter().map(|i| i.user_id.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        Vocab::from_parts(skills, users)
    }

    pub fn from_parts(skills: Vec<String>, users: Vec<String>) -> Vocab {
        let skill_index = skills.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let user_index = users.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();
        Vocab { skills, users, skill_index, user_index }
    }

    /// Rebuilds the lookup maps after deserialization.
    pub fn reindex(&mut self) {
        self.skill_index = self.skills.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        self.user_index = self.users.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();
    }

    /// Number of skill buckets including the reserved unknown slot.
    pub fn num_skills(&self) -> usize {
        self.skills.len() + 1
    }

    /// Observed training skills, excluding the unknown bucket.
    pub fn observed_skills(&self) -> &[String] {
        &self.skills
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn skill_index(&self, skill: &str) -> usize {
        self.skill_index.get(skill).copied().unwrap_or(self.skills.len())
    }

    pub fn unknown_skill(&self) -> usize {
        self.skills.len()
    }

    pub fn skill_name(&self, index: usize) -> Option<&str> {
        self.skills.get(index).map(|s| s.as_str())
    }

    pub fn user_index(&self, user: &str) -> Option<usize> {
        self.user_index.get(user).copied()
    }

    pub fn user_name(&self, index: usize) -> Option<&str> {
        self.users.get(index).map(|s| s.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(user: &str, skill: &str) -> Interaction {
        Interaction { user_id: user.into(), skill_id: skill.into(), correct: 1, overlap_time: 100.0 }
    }

    #[test]
    fn unknown_skill_maps_to_reserved_bucket() {
        let vocab = Vocab::build(&[row("u1", "a"), row("u1", "b"), row("u2", "a")]);
        assert_eq!(vocab.num_skills(), 3); // a, b, unknown
        assert_eq!(vocab.skill_index("a"), 0);
        assert_eq!(vocab.skill_index("b"), 1);
        assert_eq!(vocab.skill_index("never-seen"), 2);
        assert_eq!(vocab.unknown_skill(), 2);
    }

    #[test]
    fn build_is_order_independent() {
        let a = Vocab::build(&[row("u2", "y"), row("u1", "x")]);
        let b = Vocab::build(&[row("u1", "x"), row("u2", "y")]);
        assert_eq!(a.observed_skills(), b.observed_skills());
        assert_eq!(a.users(), b.users());
    }
}
