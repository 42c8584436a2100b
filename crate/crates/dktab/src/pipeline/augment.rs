//! Merging synthetic rows into the training split.

use std::collections::{HashMap, HashSet};

use crate::data::Interaction;

/// Picks a user-id prefix that no real user shares, so remapped synthetic
/// users can never collide with real ones.
pub fn synthetic_namespace<'a>(real_users: impl Iterator<Item = &'a str>) -> String {
    let users: Vec<&str> = real_users.collect();
    let mut prefix = String::from("syn:");
    while users.iter().any(|u| u.starts_with(&prefix)) {
        prefix.push('#');
    }
    prefix
}

/// Concatenates training and synthetic interactions. Synthetic user ids
/// are remapped into a reserved namespace (grouping preserved: rows that
/// shared a sampled user id still share a remapped id); relative order
/// within each source is preserved.
pub fn augment(train: &[Interaction], synthetic: &[Interaction]) -> Vec<Interaction> {
    let namespace = synthetic_namespace(train.iter().map(|i| i.user_id.as_str()));
    let mut remap: HashMap<&str, String> = HashMap::new();
    let mut next_id = 0usize;
    let mut combined = Vec::with_capacity(train.len() + synthetic.len());
    combined.extend_from_slice(train);
    for row in synthetic {
        let mapped = remap.entry(row.user_id.as_str()).or_insert_with(|| {
            let id = format!("{namespace}{next_id:05}");
            next_id += 1;
            id
        });
        combined.push(Interaction { user_id: mapped.clone(), ..row.clone() });
    }
    combined
}

/// True when no user id appears in both the first `n_train` rows and the
/// remainder — the property `augment` guarantees.
pub fn namespaces_disjoint(combined: &[Interaction], n_train: usize) -> bool {
    let train_users: HashSet<&str> = combined[..n_train].iter().map(|i| i.user_id.as_str()).collect();
    combined[n_train..].iter().all(|i| !train_users.contains(i.user_id.as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;

    fn row(user: &str, skill: &str) -> Interaction {
        Interaction { user_id: user.into(), skill_id: skill.into(), correct: 1, overlap_time: 7.0 }
    }

    #[test]
    fn empty_synthetic_is_identity() {
        let train = vec![row("a", "s"), row("b", "s")];
        assert_eq!(augment(&train, &[]), train);
    }

    #[test]
    fn sizes_always_add() {
        let train = vec![row("a", "s")];
        let synthetic = vec![row("a", "s"), row("b", "t"), row("a", "u")];
        let combined = augment(&train, &synthetic);
        assert_eq!(combined.len(), 4);
    }

    #[test]
    fn grouping_survives_remapping() {
        let train = vec![row("a", "s")];
        let synthetic = vec![row("x", "s1"), row("y", "s2"), row("x", "s3")];
        let combined = augment(&train, &synthetic);
        assert_eq!(combined[1].user_id, combined[3].user_id);
        assert_ne!(combined[1].user_id, combined[2].user_id);
        // per-source order preserved
        assert_eq!(combined[1].skill_id, "s1");
        assert_eq!(combined[3].skill_id, "s3");
    }

    #[test]
    fn no_collisions_even_with_adversarial_real_ids() {
        let mut rng = Rng::new(14);
        for trial in 0..50 {
            let mut train: Vec<Interaction> = (0..5 + rng.index(20)).map(|i| row(&format!("u{i}"), "s")).collect();
            if trial % 3 == 0 {
                // real users already squatting on the syn: prefix
                train.push(row("syn:00000", "s"));
                train.push(row("syn:#00001", "s"));
            }
            let synthetic: Vec<Interaction> =
                (0..rng.index(30)).map(|_| row(&format!("u{}", rng.index(10)), "t")).collect();
            let combined = augment(&train, &synthetic);
            assert!(namespaces_disjoint(&combined, train.len()), "collision in trial {trial}");
        }
    }
}
