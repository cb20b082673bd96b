//! Privacy levels from Huffman node depths.
//!
//! A value's raw depth is its code length. Depths are shifted so the
//! shallowest value sits at depth 1 (`effective = raw - (min_raw - 1)`), then
//! clamped to `l_max` to give the privacy level. Rare values sit deeper and so
//! get higher levels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::huffman::{canonical, HuffmanCodebook};

pub const DEFAULT_L_MAX: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub value: f64,
    pub raw_depth: u32,
    pub effective_depth: u32,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAssignment {
    entries: Vec<LevelEntry>,
    l_max: u32,
}

impl LevelAssignment {
    /// Entries ascending by value.
    pub fn entries(&self) -> &[LevelEntry] {
        &self.entries
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn get(&self, value: f64) -> Option<&LevelEntry> {
        let value = canonical(value);
        self.entries
            .binary_search_by(|e| e.value.total_cmp(&value))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn level(&self, value: f64) -> Option<u32> {
        self.get(value).map(|e| e.level)
    }
}

pub fn assign_levels(book: &HuffmanCodebook, l_max: u32) -> Result<LevelAssignment> {
    assign_levels_from_lengths(book.lengths(), l_max)
}

/// Same as [`assign_levels`] but over arbitrary `(value, code length)` pairs.
pub fn assign_levels_from_lengths<I>(lengths: I, l_max: u32) -> Result<LevelAssignment>
where
    I: IntoIterator<Item = (f64, u32)>,
{
    if l_max == 0 {
        return Err(Error::InvalidParameter("l_max must be at least 1".into()));
    }
    let mut raw: Vec<(f64, u32)> = lengths
        .into_iter()
        .map(|(v, len)| (canonical(v), len))
        .collect();
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&(v, _)) = raw.iter().find(|e| e.1 == 0) {
        return Err(Error::InvalidParameter(format!(
            "zero code length for value {v}"
        )));
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let first_depth = raw.iter().map(|e| e.1).min().expect("non-empty");

    let entries = raw
        .into_iter()
        .map(|(value, raw_depth)| {
            let effective_depth = raw_depth - (first_depth - 1);
            LevelEntry {
                value,
                raw_depth,
                effective_depth,
                level: effective_depth.min(l_max),
            }
        })
        .collect();
    Ok(LevelAssignment { entries, l_max })
}

/// Informational label attached to a privacy level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrivacyLabel {
    Low,
    Medium,
    High,
}

impl fmt::Display for PrivacyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrivacyLabel::Low => "Low",
            PrivacyLabel::Medium => "Medium",
            PrivacyLabel::High => "High",
        })
    }
}

pub fn required_privacy_label(level: u32) -> PrivacyLabel {
    match level {
        0 | 1 => PrivacyLabel::Low,
        2 | 3 => PrivacyLabel::Medium,
        _ => PrivacyLabel::High,
    }
}
