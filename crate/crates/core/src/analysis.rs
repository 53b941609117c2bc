//! Severity, occurrence and detection reasoning over the RF/FC mappings, and
//! RPN prioritisation of every failure mode.
//!
//! Severity flows forward (requirements → functions → components), taking
//! the maximum of an element's own failure modes and everything mapped into
//! it. Occurrence and detection originate at components and flow backward
//! (components → functions → requirements) by maximum.

mod oracle;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

pub use oracle::oracle_propagate;

use crate::error::AnalysisError;
use crate::index::ModelIndex;
use crate::model::{
    Cause, ControlPlan, DesignModel, Effect, ElementDomain, ElementId, FailureMode, Rank,
};
use crate::rating::{detection_band, occurrence_band, representative_rank, rpn, severity_band};
use crate::validate::{Finding, FindingCode, FindingSeverity};

/// Element id → propagated rank. Elements with nothing to derive a rank from
/// are absent.
pub type RankMap = BTreeMap<ElementId, Rank>;
pub type SeverityMap = RankMap;
pub type OccurrenceMap = RankMap;
pub type DetectionMap = RankMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Carry component detection up to functions and requirements. When off,
    /// rows without their own control plan have no D and rank by `S × O`.
    pub propagate_detection: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            propagate_detection: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RpnRow {
    pub failure_mode: ElementId,
    pub element: ElementId,
    pub domain: ElementDomain,
    pub severity: Rank,
    pub occurrence: Rank,
    pub detection: Option<Rank>,
    pub rpn: u16,
    pub rank_position: usize,
}

impl RpnRow {
    /// Priority order: RPN, then S, O, D descending, then element and
    /// failure-mode id ascending.
    pub fn priority_cmp(&self, other: &Self) -> Ordering {
        other
            .rpn
            .cmp(&self.rpn)
            .then(other.severity.cmp(&self.severity))
            .then(other.occurrence.cmp(&self.occurrence))
            .then(other.detection.cmp(&self.detection))
            .then(self.element.cmp(&other.element))
            .then(self.failure_mode.cmp(&other.failure_mode))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisResult {
    pub severity: SeverityMap,
    pub occurrence: OccurrenceMap,
    pub detection: DetectionMap,
    /// One row per failure mode, highest priority first.
    pub rows: Vec<RpnRow>,
    /// Elements left out of a propagated map.
    pub warnings: Vec<Finding>,
}

impl AnalysisResult {
    pub fn row(&self, failure_mode: &ElementId) -> Option<&RpnRow> {
        self.rows.iter().find(|r| &r.failure_mode == failure_mode)
    }
}

/// Severity of one effect: its explicit rank, else the top of its class band.
pub fn effect_rank(effect: &Effect) -> Option<Rank> {
    effect.severity_rank.or_else(|| {
        effect
            .severity_class
            .map(|c| representative_rank(severity_band(c)))
    })
}

/// Occurrence of one cause: its explicit rank, else the top of its
/// frequency band.
pub fn cause_rank(cause: &Cause) -> Option<Rank> {
    cause.occurrence_rank.or_else(|| {
        cause
            .frequency
            .map(|f| representative_rank(occurrence_band(f)))
    })
}

pub fn control_rank(control: &ControlPlan) -> Rank {
    control
        .detection_rank
        .unwrap_or_else(|| representative_rank(detection_band(control.method_class)))
}

fn own_severity(fm: &FailureMode) -> Option<Rank> {
    fm.effects.iter().filter_map(effect_rank).max()
}

fn own_occurrence(fm: &FailureMode) -> Option<Rank> {
    fm.causes.iter().filter_map(cause_rank).max()
}

fn lookup<'a>(model: &'a DesignModel, fm_id: &ElementId) -> Result<&'a FailureMode, AnalysisError> {
    model
        .failure_mode(fm_id)
        .ok_or_else(|| AnalysisError::UnknownFailureMode(fm_id.clone()))
}

/// Severity of a failure mode: its most serious effect.
pub fn fm_severity(model: &DesignModel, fm_id: &ElementId) -> Result<Rank, AnalysisError> {
    let fm = lookup(model, fm_id)?;
    own_severity(fm).ok_or_else(|| AnalysisError::MissingSeverity(fm.id.clone()))
}

/// Occurrence of a failure mode: its most likely cause.
pub fn fm_occurrence(model: &DesignModel, fm_id: &ElementId) -> Result<Rank, AnalysisError> {
    let fm = lookup(model, fm_id)?;
    own_occurrence(fm).ok_or_else(|| AnalysisError::MissingOccurrence(fm.id.clone()))
}

/// Detection of a failure mode from its control plan.
pub fn fm_detection(model: &DesignModel, fm_id: &ElementId) -> Result<Rank, AnalysisError> {
    let fm = lookup(model, fm_id)?;
    fm.control
        .as_ref()
        .map(control_rank)
        .ok_or_else(|| AnalysisError::MissingDetection(fm.id.clone()))
}

/// Max over an element's own failure modes. `required` turns an unratable
/// mode into an error instead of skipping it.
fn local_max(
    modes: &[&FailureMode],
    rate: impl Fn(&FailureMode) -> Option<Rank>,
    required: Option<fn(ElementId) -> AnalysisError>,
) -> Result<Option<Rank>, AnalysisError> {
    let mut best = None;
    for fm in modes {
        match (rate(fm), required) {
            (Some(rank), _) => best = best.max(Some(rank)),
            (None, Some(err)) => return Err(err(fm.id.clone())),
            (None, None) => {}
        }
    }
    Ok(best)
}

fn max_over<'a>(map: &RankMap, ids: impl Iterator<Item = &'a ElementId>) -> Option<Rank> {
    ids.filter_map(|id| map.get(id).copied()).max()
}

fn forward_with(index: &ModelIndex<'_>) -> Result<SeverityMap, AnalysisError> {
    let mut map = SeverityMap::new();
    for r in index.ids(ElementDomain::Requirement) {
        let own = local_max(
            index.modes_of(r),
            own_severity,
            Some(AnalysisError::MissingSeverity),
        )?;
        if let Some(rank) = own {
            map.insert(r.clone(), rank);
        }
    }
    for level in [ElementDomain::Function, ElementDomain::Component] {
        let mut next = Vec::new();
        for x in index.ids(level) {
            let own = local_max(index.modes_of(x), own_severity, None)?;
            if let Some(rank) = own.max(max_over(&map, index.above(x))) {
                next.push((x.clone(), rank));
            }
        }
        map.extend(next);
    }
    Ok(map)
}

/// Backward propagation of a component-level rating.
fn backward_with(
    index: &ModelIndex<'_>,
    rate: impl Fn(&FailureMode) -> Option<Rank>,
    missing: fn(ElementId) -> AnalysisError,
) -> Result<RankMap, AnalysisError> {
    let mut map = RankMap::new();
    for c in index.ids(ElementDomain::Component) {
        if let Some(rank) = local_max(index.modes_of(c), &rate, Some(missing))? {
            map.insert(c.clone(), rank);
        }
    }
    for level in [ElementDomain::Function, ElementDomain::Requirement] {
        let mut next = Vec::new();
        for x in index.ids(level) {
            if let Some(rank) = max_over(&map, index.below(x)) {
                next.push((x.clone(), rank));
            }
        }
        map.extend(next);
    }
    Ok(map)
}

fn occurrence_with(index: &ModelIndex<'_>) -> Result<OccurrenceMap, AnalysisError> {
    backward_with(index, own_occurrence, AnalysisError::MissingOccurrence)
}

fn detection_with(index: &ModelIndex<'_>) -> Result<DetectionMap, AnalysisError> {
    backward_with(
        index,
        |fm| fm.control.as_ref().map(control_rank),
        AnalysisError::MissingDetection,
    )
}

/// `S(r)` from each requirement's failure modes, then `S(f)` and `S(c)` as
/// the max of own modes and every mapped upstream element.
pub fn forward_severity(model: &DesignModel) -> Result<SeverityMap, AnalysisError> {
    forward_with(&ModelIndex::new(model))
}

/// `O(c)` from each component's failure modes, then `O(f)` and `O(r)` as the
/// max over mapped downstream elements.
pub fn backward_occurrence(model: &DesignModel) -> Result<OccurrenceMap, AnalysisError> {
    occurrence_with(&ModelIndex::new(model))
}

/// `D(c)` is the worst detection over a component's failure modes; functions
/// and requirements take the max over mapped downstream elements.
pub fn assign_detection(model: &DesignModel) -> Result<DetectionMap, AnalysisError> {
    detection_with(&ModelIndex::new(model))
}

pub fn analyze(model: &DesignModel) -> Result<AnalysisResult, AnalysisError> {
    analyze_with(model, AnalysisOptions::default())
}

pub fn analyze_with(
    model: &DesignModel,
    options: AnalysisOptions,
) -> Result<AnalysisResult, AnalysisError> {
    let index = ModelIndex::new(model);
    let severity = forward_with(&index)?;
    let detection = detection_with(&index)?;
    let occurrence = occurrence_with(&index)?;

    let mut rows = Vec::with_capacity(model.failure_modes.len());
    for fm in &model.failure_modes {
        let domain = index
            .domain(&fm.element)
            .ok_or_else(|| AnalysisError::UnknownElement(fm.element.clone()))?;
        let propagated = |map: &RankMap| map.get(&fm.element).copied();

        let s = own_severity(fm)
            .or_else(|| propagated(&severity))
            .ok_or_else(|| AnalysisError::MissingSeverity(fm.id.clone()))?;
        let o = match domain {
            ElementDomain::Component => own_occurrence(fm),
            _ => propagated(&occurrence),
        }
        .ok_or_else(|| AnalysisError::MissingOccurrence(fm.id.clone()))?;
        let d = match (&fm.control, domain, options.propagate_detection) {
            (Some(control), _, _) => Some(control_rank(control)),
            (None, ElementDomain::Component, _) => {
                return Err(AnalysisError::MissingDetection(fm.id.clone()))
            }
            (None, _, true) => Some(
                propagated(&detection)
                    .ok_or_else(|| AnalysisError::MissingDetection(fm.id.clone()))?,
            ),
            (None, _, false) => None,
        };
        let value = match d {
            Some(d) => rpn(s, o, d),
            None => u16::from(s.value()) * u16::from(o.value()),
        };
        rows.push(RpnRow {
            failure_mode: fm.id.clone(),
            element: fm.element.clone(),
            domain,
            severity: s,
            occurrence: o,
            detection: d,
            rpn: value,
            rank_position: 0,
        });
    }
    rows.sort_by(RpnRow::priority_cmp);
    for (i, row) in rows.iter_mut().enumerate() {
        row.rank_position = i + 1;
    }

    let mut warnings = Vec::new();
    for domain in ElementDomain::ALL {
        for id in index.ids(domain) {
            let mut missing = Vec::new();
            if !severity.contains_key(id) {
                missing.push("severity");
            }
            if !occurrence.contains_key(id) {
                missing.push("occurrence");
            }
            if !detection.contains_key(id) {
                missing.push("detection");
            }
            if !missing.is_empty() {
                warnings.push(Finding {
                    severity: FindingSeverity::Warning,
                    code: FindingCode::UnratedElement,
                    message: format!(
                        "no {} could be derived for {domain} {id}",
                        missing.join("/")
                    ),
                    path: format!("{domain}:{id}"),
                    pointer: String::new(),
                });
            }
        }
    }
    warnings.sort_by(|a, b| a.path.cmp(&b.path));

    Ok(AnalysisResult {
        severity,
        occurrence,
        detection,
        rows,
        warnings,
    })
}
