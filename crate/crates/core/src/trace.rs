//! Cause/effect tracing through the RF and FC mappings.
//!
//! A failure mode of a component shows up as a cause at the functions the
//! component serves, and those functions' failure modes in turn show up at
//! the requirements they satisfy. Tracing lists these neighbours; it does not
//! build multi-level cause trees.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::AnalysisError;
use crate::index::ModelIndex;
use crate::model::{DesignModel, ElementDomain, ElementId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Upward: component → functions → requirements.
    Effects,
    /// Downward: requirement → functions → components.
    Causes,
}

impl Direction {
    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "effects" => Some(Direction::Effects),
            "causes" => Some(Direction::Causes),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceHop {
    pub element: ElementId,
    pub domain: ElementDomain,
    pub failure_mode: Option<ElementId>,
    /// Failure-mode description, or the element's own text when it has no
    /// failure modes.
    pub text: String,
    /// Neighbour this hop was reached from; `None` for the starting hop.
    pub via: Option<ElementId>,
    /// 0 for the starting element, 1 and 2 for mapping levels away from it.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceChain {
    pub direction: Direction,
    pub hops: Vec<TraceHop>,
}

impl TraceChain {
    pub fn texts(&self) -> Vec<&str> {
        self.hops.iter().map(|h| h.text.as_str()).collect()
    }
}

impl fmt::Display for TraceChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.direction {
            Direction::Effects => "->",
            Direction::Causes => "<-",
        };
        for hop in &self.hops {
            let lead = match hop.depth {
                0 => String::new(),
                d => format!("{}{arrow} ", "  ".repeat(d - 1)),
            };
            let fm = hop
                .failure_mode
                .as_ref()
                .map_or_else(|| "-".to_string(), ElementId::to_string);
            writeln!(
                f,
                "{lead}{} {} [{fm}] {}",
                hop.domain, hop.element, hop.text
            )?;
        }
        Ok(())
    }
}

pub fn trace(
    model: &DesignModel,
    fm_id: &ElementId,
    direction: Direction,
) -> Result<TraceChain, AnalysisError> {
    let start = model
        .failure_mode(fm_id)
        .ok_or_else(|| AnalysisError::UnknownFailureMode(fm_id.clone()))?;
    let index = ModelIndex::new(model);
    let domain = index
        .domain(&start.element)
        .ok_or_else(|| AnalysisError::UnknownElement(start.element.clone()))?;

    let mut hops = vec![TraceHop {
        element: start.element.clone(),
        domain,
        failure_mode: Some(start.id.clone()),
        text: start.description.clone(),
        via: None,
        depth: 0,
    }];

    let step = |id: &ElementId| -> Vec<&ElementId> {
        match direction {
            Direction::Effects => index.above(id).collect(),
            Direction::Causes => index.below(id).collect(),
        }
    };

    // element → the first (smallest id) element it was reached from
    let mut frontier: BTreeMap<&ElementId, &ElementId> = BTreeMap::new();
    for next in step(&start.element) {
        frontier.entry(next).or_insert(&start.element);
    }
    let mut depth = 1;
    while !frontier.is_empty() && depth <= 2 {
        let mut upcoming: BTreeMap<&ElementId, &ElementId> = BTreeMap::new();
        for (&element, &via) in &frontier {
            let element_domain = index.domain(element).expect("indexed element");
            let modes = index.modes_of(element);
            if modes.is_empty() {
                hops.push(TraceHop {
                    element: element.clone(),
                    domain: element_domain,
                    failure_mode: None,
                    text: model.element_text(element).unwrap_or_default(),
                    via: Some(via.clone()),
                    depth,
                });
            }
            for fm in modes {
                hops.push(TraceHop {
                    element: element.clone(),
                    domain: element_domain,
                    failure_mode: Some(fm.id.clone()),
                    text: fm.description.clone(),
                    via: Some(via.clone()),
                    depth,
                });
            }
            for next in step(element) {
                upcoming.entry(next).or_insert(element);
            }
        }
        frontier = upcoming;
        depth += 1;
    }

    Ok(TraceChain { direction, hops })
}
