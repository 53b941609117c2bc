//! Path-enumeration reference for the propagated rank maps.
//!
//! Every path `x`, `r→f`, `f→c` and `r→f→c` is listed straight from the edge
//! lists. Severity at a path's last node is the max of the local ratings of
//! all nodes on the path; occurrence and detection at a path's first node are
//! the local ratings of its component end. No propagated value is reused.

use std::collections::BTreeMap;

use crate::error::AnalysisError;
use crate::model::{DesignModel, ElementId, FailureMode, Rank};
use crate::rating::{detection_band, occurrence_band, severity_band};

use super::{DetectionMap, OccurrenceMap, SeverityMap};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Requirement,
    Function,
    Component,
}

fn band_top_severity(fm: &FailureMode) -> Option<Rank> {
    let mut best: Option<Rank> = None;
    for effect in &fm.effects {
        let rank = match (effect.severity_rank, effect.severity_class) {
            (Some(rank), _) => rank,
            (None, Some(class)) => severity_band(class).hi(),
            (None, None) => continue,
        };
        if best.is_none_or(|b| rank > b) {
            best = Some(rank);
        }
    }
    best
}

fn band_top_occurrence(fm: &FailureMode) -> Option<Rank> {
    let mut best: Option<Rank> = None;
    for cause in &fm.causes {
        let rank = match (cause.occurrence_rank, cause.frequency) {
            (Some(rank), _) => rank,
            (None, Some(freq)) => occurrence_band(freq).hi(),
            (None, None) => continue,
        };
        if best.is_none_or(|b| rank > b) {
            best = Some(rank);
        }
    }
    best
}

fn band_top_detection(fm: &FailureMode) -> Option<Rank> {
    let control = fm.control.as_ref()?;
    Some(
        control
            .detection_rank
            .unwrap_or_else(|| detection_band(control.method_class).hi()),
    )
}

fn raise(map: &mut BTreeMap<ElementId, Rank>, id: &ElementId, rank: Rank) {
    let slot = map.entry(id.clone()).or_insert(rank);
    if rank > *slot {
        *slot = rank;
    }
}

/// Computes the severity, occurrence and detection maps by enumerating every
/// mapping path. Intended for cross-checking the direct propagation on small
/// models.
pub fn oracle_propagate(
    model: &DesignModel,
) -> Result<(SeverityMap, OccurrenceMap, DetectionMap), AnalysisError> {
    let class_of = |id: &ElementId| -> Option<Class> {
        if model.requirements.iter().any(|r| &r.id == id) {
            Some(Class::Requirement)
        } else if model.functions.iter().any(|f| &f.id == id) {
            Some(Class::Function)
        } else if model.components.iter().any(|c| &c.id == id) {
            Some(Class::Component)
        } else {
            None
        }
    };

    // Local ratings straight from each element's own failure modes.
    let mut local_s: BTreeMap<ElementId, Rank> = BTreeMap::new();
    let mut local_o: BTreeMap<ElementId, Rank> = BTreeMap::new();
    let mut local_d: BTreeMap<ElementId, Rank> = BTreeMap::new();
    for fm in &model.failure_modes {
        let class = class_of(&fm.element)
            .ok_or_else(|| AnalysisError::UnknownElement(fm.element.clone()))?;
        match band_top_severity(fm) {
            Some(rank) => raise(&mut local_s, &fm.element, rank),
            None if class == Class::Requirement => {
                return Err(AnalysisError::MissingSeverity(fm.id.clone()))
            }
            None => {}
        }
        if class == Class::Component {
            let o = band_top_occurrence(fm)
                .ok_or_else(|| AnalysisError::MissingOccurrence(fm.id.clone()))?;
            let d = band_top_detection(fm)
                .ok_or_else(|| AnalysisError::MissingDetection(fm.id.clone()))?;
            raise(&mut local_o, &fm.element, o);
            raise(&mut local_d, &fm.element, d);
        }
    }

    let mut paths: Vec<Vec<&ElementId>> = Vec::new();
    for id in model
        .requirements
        .iter()
        .map(|r| &r.id)
        .chain(model.functions.iter().map(|f| &f.id))
        .chain(model.components.iter().map(|c| &c.id))
    {
        paths.push(vec![id]);
    }
    let rf: Vec<_> = model
        .rf
        .iter()
        .filter(|e| {
            class_of(&e.from) == Some(Class::Requirement)
                && class_of(&e.to) == Some(Class::Function)
        })
        .collect();
    let fc: Vec<_> = model
        .fc
        .iter()
        .filter(|e| {
            class_of(&e.from) == Some(Class::Function) && class_of(&e.to) == Some(Class::Component)
        })
        .collect();
    for e in &rf {
        paths.push(vec![&e.from, &e.to]);
    }
    for e in &fc {
        paths.push(vec![&e.from, &e.to]);
    }
    for a in &rf {
        for b in &fc {
            if a.to == b.from {
                paths.push(vec![&a.from, &a.to, &b.to]);
            }
        }
    }

    let mut severity = SeverityMap::new();
    let mut occurrence = OccurrenceMap::new();
    let mut detection = DetectionMap::new();
    for path in &paths {
        let first = path[0];
        let last = path[path.len() - 1];
        for node in path {
            if let Some(&s) = local_s.get(*node) {
                raise(&mut severity, last, s);
            }
        }
        if let Some(&o) = local_o.get(last) {
            raise(&mut occurrence, first, o);
        }
        if let Some(&d) = local_d.get(last) {
            raise(&mut detection, first, d);
        }
    }
    Ok((severity, occurrence, detection))
}
