//! Per-failure-mode RPN changes between two versions of a model.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::analysis::AnalysisResult;
use crate::model::ElementId;

pub const DIFF_COLUMNS: [&str; 7] = [
    "fm_id", "old_rpn", "new_rpn", "delta", "old_rank", "new_rank", "move",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Up,
    Down,
    Same,
    Added,
    Removed,
}

impl Move {
    pub fn as_str(self) -> &'static str {
        match self {
            Move::Up => "up",
            Move::Down => "down",
            Move::Same => "same",
            Move::Added => "added",
            Move::Removed => "removed",
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffRow {
    pub fm_id: ElementId,
    pub old_rpn: Option<u16>,
    pub new_rpn: Option<u16>,
    pub old_rank: Option<usize>,
    pub new_rank: Option<usize>,
}

impl DiffRow {
    pub fn delta(&self) -> Option<i32> {
        Some(i32::from(self.new_rpn?) - i32::from(self.old_rpn?))
    }

    /// Direction of travel in the priority order; a smaller rank is higher.
    pub fn movement(&self) -> Move {
        match (self.old_rank, self.new_rank) {
            (None, _) => Move::Added,
            (_, None) => Move::Removed,
            (Some(a), Some(b)) if b < a => Move::Up,
            (Some(a), Some(b)) if b > a => Move::Down,
            _ => Move::Same,
        }
    }
}

/// One row per failure mode present in either result, ordered by fm id.
pub fn diff_results(old: &AnalysisResult, new: &AnalysisResult) -> Vec<DiffRow> {
    let mut rows: BTreeMap<&ElementId, DiffRow> = BTreeMap::new();
    let blank = |id: &ElementId| DiffRow {
        fm_id: id.clone(),
        old_rpn: None,
        new_rpn: None,
        old_rank: None,
        new_rank: None,
    };
    for row in &old.rows {
        let entry = rows
            .entry(&row.failure_mode)
            .or_insert_with(|| blank(&row.failure_mode));
        entry.old_rpn = Some(row.rpn);
        entry.old_rank = Some(row.rank_position);
    }
    for row in &new.rows {
        let entry = rows
            .entry(&row.failure_mode)
            .or_insert_with(|| blank(&row.failure_mode));
        entry.new_rpn = Some(row.rpn);
        entry.new_rank = Some(row.rank_position);
    }
    rows.into_values().collect()
}

pub fn diff_csv(rows: &[DiffRow]) -> String {
    fn cell<T: ToString>(v: Option<T>) -> String {
        v.map_or_else(|| "-".to_string(), |v| v.to_string())
    }
    let mut out = DIFF_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        let cells = [
            row.fm_id.to_string(),
            cell(row.old_rpn),
            cell(row.new_rpn),
            cell(row.delta()),
            cell(row.old_rank),
            cell(row.new_rank),
            row.movement().to_string(),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
