//! Delimited-text ingestion with exact-duplicate removal.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Interaction;
use crate::error::{Error, Result};

/// Maps the four required attributes onto column names in the input file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ColumnSchema {
    pub user_id: String,
    pub skill_id: String,
    pub correct: String,
    pub overlap_time: String,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        ColumnSchema {
            user_id: "user_id".into(),
            skill_id: "skill_id".into(),
            correct: "correct".into(),
            overlap_time: "overlap_time".into(),
        }
    }
}

/// Counts reported by [`load_interactions`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub duplicates_removed: usize,
    pub rows_dropped: usize,
    pub distinct_users: usize,
    pub distinct_skills: usize,
}

/// Reads a comma-separated file with a header row. Rows are returned in
/// file order; exact duplicates (all four attributes equal) keep their
/// first occurrence, and rows with missing or unparseable required fields
/// are dropped and counted.
pub fn load_interactions(path: impl AsRef<Path>, schema: &ColumnSchema) -> Result<(Vec<Interaction>, LoadReport)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path.display().to_string(), std::io::Error::other(e.to_string())),
            _ => Error::InvalidArgument(format!("{}: {e}", path.display())),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Schema(name.to_string()))
    };
    let user_col = col(&schema.user_id)?;
    let skill_col = col(&schema.skill_id)?;
    let correct_col = col(&schema.correct)?;
    let time_col = col(&schema.overlap_time)?;

    let mut interactions = Vec::new();
    let mut seen: HashSet<(String, String, u8, u64)> = HashSet::new();
    let mut rows_read = 0usize;
    let mut rows_dropped = 0usize;
    let mut duplicates_removed = 0usize;

    for record in reader.records() {
        let record = record.map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        rows_read += 1;
        let parsed = parse_row(&record, user_col, skill_col, correct_col, time_col);
        let Some(interaction) = parsed else {
            rows_dropped += 1;
            continue;
        };
        let key = (
            interaction.user_id.clone(),
            interaction.skill_id.clone(),
            interaction.correct,
            interaction.overlap_time.to_bits(),
        );
        if !seen.insert(key) {
            duplicates_removed += 1;
            continue;
        }
        interactions.push(interaction);
    }

    let distinct_users = interactions.iter().map(|i| i.user_id.as_str()).collect::<HashSet<_>>().len();
    let distinct_skills = interactions.iter().map(|i| i.skill_id.as_str()).collect::<HashSet<_>>().len();
    let report = LoadReport {
        rows_read,
        rows_kept: interactions.len(),
        duplicates_removed,
        rows_dropped,
        distinct_users,
        distinct_skills,
    };
    if rows_dropped > 0 {
        eprintln!("warning: dropped {rows_dropped} rows with missing or unparseable fields from {}", path.display());
    }
    Ok((interactions, report))
}

fn parse_row(record: &csv::StringRecord, user: usize, skill: usize, correct: usize, time: usize) -> Option<Interaction> {
    let user_id = record.get(user)?.trim();
    let skill_id = record.get(skill)?.trim();
    if user_id.is_empty() || skill_id.is_empty() {
        return None;
    }
    let correct_raw: f64 = record.get(correct)?.trim().parse().ok()?;
    let correct = if correct_raw == 0.0 {
        0
    } else if correct_raw == 1.0 {
        1
    } else {
        return None;
    };
    let overlap_time: f64 = record.get(time)?.trim().parse().ok()?;
    if !overlap_time.is_finite() || overlap_time < 0.0 {
        return None;
    }
    Some(Interaction { user_id: user_id.to_string(), skill_id: skill_id.to_string(), correct, overlap_time })
}

/// Writes interactions in the canonical four-column format.
pub fn write_interactions(path: impl AsRef<Path>, interactions: &[Interaction]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e.to_string())))?;
    writer
        .write_record(["user_id", "skill_id", "correct", "overlap_time"])
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e.to_string())))?;
    for i in interactions {
        writer
            .write_record([i.user_id.as_str(), i.skill_id.as_str(), &i.correct.to_string(), &format!("{}", i.overlap_time)])
            .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e.to_string())))?;
    }
    writer.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}
