use std::collections::{BTreeMap, BTreeSet};

use crate::model::{DesignModel, ElementDomain, ElementId, FailureMode};

/// Lookup tables over a model. Edges whose endpoints are not of the expected
/// classes are ignored; the validator reports them.
pub(crate) struct ModelIndex<'a> {
    pub domains: BTreeMap<&'a ElementId, ElementDomain>,
    pub modes: BTreeMap<&'a ElementId, Vec<&'a FailureMode>>,
    /// requirement → functions
    pub rf_down: BTreeMap<&'a ElementId, BTreeSet<&'a ElementId>>,
    /// function → requirements
    pub rf_up: BTreeMap<&'a ElementId, BTreeSet<&'a ElementId>>,
    /// function → components
    pub fc_down: BTreeMap<&'a ElementId, BTreeSet<&'a ElementId>>,
    /// component → functions
    pub fc_up: BTreeMap<&'a ElementId, BTreeSet<&'a ElementId>>,
}

impl<'a> ModelIndex<'a> {
    pub fn new(model: &'a DesignModel) -> Self {
        let mut domains = BTreeMap::new();
        for domain in ElementDomain::ALL {
            for id in model.element_ids(domain) {
                domains.entry(id).or_insert(domain);
            }
        }
        let mut modes: BTreeMap<&ElementId, Vec<&FailureMode>> = BTreeMap::new();
        for fm in &model.failure_modes {
            modes.entry(&fm.element).or_default().push(fm);
        }
        // Fixed order regardless of declaration order.
        for list in modes.values_mut() {
            list.sort_by(|a, b| a.id.cmp(&b.id));
        }

        let mut index = Self {
            domains,
            modes,
            rf_down: BTreeMap::new(),
            rf_up: BTreeMap::new(),
            fc_down: BTreeMap::new(),
            fc_up: BTreeMap::new(),
        };
        for edge in &model.rf {
            if index.is(&edge.from, ElementDomain::Requirement)
                && index.is(&edge.to, ElementDomain::Function)
            {
                index
                    .rf_down
                    .entry(&edge.from)
                    .or_default()
                    .insert(&edge.to);
                index.rf_up.entry(&edge.to).or_default().insert(&edge.from);
            }
        }
        for edge in &model.fc {
            if index.is(&edge.from, ElementDomain::Function)
                && index.is(&edge.to, ElementDomain::Component)
            {
                index
                    .fc_down
                    .entry(&edge.from)
                    .or_default()
                    .insert(&edge.to);
                index.fc_up.entry(&edge.to).or_default().insert(&edge.from);
            }
        }
        index
    }

    pub fn is(&self, id: &ElementId, domain: ElementDomain) -> bool {
        self.domains.get(id) == Some(&domain)
    }

    pub fn domain(&self, id: &ElementId) -> Option<ElementDomain> {
        self.domains.get(id).copied()
    }

    pub fn modes_of(&self, id: &ElementId) -> &[&'a FailureMode] {
        self.modes.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Elements one mapping level below `id` (functions of a requirement,
    /// components of a function).
    pub fn below(&self, id: &ElementId) -> impl Iterator<Item = &'a ElementId> + '_ {
        self.rf_down
            .get(id)
            .into_iter()
            .chain(self.fc_down.get(id))
            .flatten()
            .copied()
    }

    /// Elements one mapping level above `id`.
    pub fn above(&self, id: &ElementId) -> impl Iterator<Item = &'a ElementId> + '_ {
        self.rf_up
            .get(id)
            .into_iter()
            .chain(self.fc_up.get(id))
            .flatten()
            .copied()
    }

    /// Sorted ids of one element class.
    pub fn ids(&self, domain: ElementDomain) -> impl Iterator<Item = &'a ElementId> + '_ {
        self.domains
            .iter()
            .filter(move |(_, &d)| d == domain)
            .map(|(&id, _)| id)
    }
}
