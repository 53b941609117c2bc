//! Structural and analysis-readiness checks over a [`DesignModel`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::analysis::{cause_rank, control_rank, effect_rank};
use crate::index::ModelIndex;
use crate::model::{DesignModel, ElementDomain, ElementId, FailureMode, MappingEdge};
use crate::rating::{detection_band, occurrence_band, rank_consistent, severity_band};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strictness {
    /// The file is well-formed and internally consistent.
    Structural,
    /// Additionally complete enough to run the full analysis.
    AnalysisReady,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FindingSeverity {
    Error,
    Warning,
}

impl fmt::Display for FindingSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FindingSeverity::Error => "error",
            FindingSeverity::Warning => "warning",
        })
    }
}

crate::model::token_enum!(FindingCode {
    DuplicateId,
    DuplicateEdge,
    DanglingReference,
    EdgeDirection,
    EmptyText,
    CategoryDomainMismatch,
    SeverityClassDomainMismatch,
    SeverityBandMismatch,
    OccurrenceBandMismatch,
    DetectionBandMismatch,
    MissingSeverityRating,
    MissingOccurrenceRating,
    MissingDetectionRating,
    UnresolvableSeverity,
    UnresolvableOccurrence,
    OrphanFunction,
    OrphanComponent,
    NoFailureModes,
    EmptyEffects,
    EmptyCauses,
    UnratedElement,
});

impl Serialize for FindingCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: FindingSeverity,
    pub code: FindingCode,
    pub message: String,
    /// Id-based location, e.g. `failure_mode:fm1/effects[0]`.
    pub path: String,
    /// JSON pointer into the model document, e.g. `/failure_modes/3/effects/0`.
    pub pointer: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.code, self.path, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == FindingSeverity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == FindingSeverity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings().count()
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn count(&self, code: FindingCode) -> usize {
        self.findings.iter().filter(|f| f.code == code).count()
    }
}

struct Collector {
    findings: Vec<Finding>,
}

impl Collector {
    fn push(
        &mut self,
        severity: FindingSeverity,
        code: FindingCode,
        path: String,
        pointer: String,
        message: String,
    ) {
        self.findings.push(Finding {
            severity,
            code,
            message,
            path,
            pointer,
        });
    }

    fn error(&mut self, code: FindingCode, path: String, pointer: String, message: String) {
        self.push(FindingSeverity::Error, code, path, pointer, message);
    }

    fn warning(&mut self, code: FindingCode, path: String, pointer: String, message: String) {
        self.push(FindingSeverity::Warning, code, path, pointer, message);
    }

    fn non_empty(&mut self, text: &str, path: String, pointer: String, what: &str) {
        if text.trim().is_empty() {
            self.error(
                FindingCode::EmptyText,
                path,
                pointer,
                format!("{what} is empty"),
            );
        }
    }
}

fn element_path(domain: ElementDomain, id: &ElementId) -> String {
    format!("{domain}:{id}")
}

fn fm_path(fm: &FailureMode) -> String {
    format!("failure_mode:{}", fm.id)
}

/// Checks `model` and returns every finding, sorted by path then code.
pub fn validate_model(model: &DesignModel, strictness: Strictness) -> ValidationReport {
    let index = ModelIndex::new(model);
    let mut out = Collector {
        findings: Vec::new(),
    };

    check_elements(model, &index, &mut out);
    check_edges(model, &index, &mut out);
    for (i, fm) in model.failure_modes.iter().enumerate() {
        check_failure_mode(i, fm, &index, &mut out);
    }
    check_duplicate_failure_modes(model, &mut out);
    if strictness == Strictness::AnalysisReady {
        check_analysis_ready(model, &index, &mut out);
    }

    let mut findings = out.findings;
    findings.sort_by(|a, b| {
        (&a.path, a.code.token(), &a.pointer, a.severity).cmp(&(
            &b.path,
            b.code.token(),
            &b.pointer,
            b.severity,
        ))
    });
    ValidationReport { findings }
}

fn check_elements(model: &DesignModel, index: &ModelIndex<'_>, out: &mut Collector) {
    let mut seen = HashSet::new();
    let mut check_id = |out: &mut Collector, domain: ElementDomain, id: &ElementId, ptr: String| {
        if !seen.insert(id.clone()) {
            out.error(
                FindingCode::DuplicateId,
                element_path(domain, id),
                format!("{ptr}/id"),
                format!("id {id} is declared more than once"),
            );
        }
    };

    for (i, r) in model.requirements.iter().enumerate() {
        let ptr = format!("/requirements/{i}");
        check_id(out, ElementDomain::Requirement, &r.id, ptr.clone());
        let path = element_path(ElementDomain::Requirement, &r.id);
        out.non_empty(&r.text, path, format!("{ptr}/text"), "requirement text");
    }
    for (i, f) in model.functions.iter().enumerate() {
        let ptr = format!("/functions/{i}");
        check_id(out, ElementDomain::Function, &f.id, ptr.clone());
        let path = element_path(ElementDomain::Function, &f.id);
        out.non_empty(
            &f.verb,
            path.clone(),
            format!("{ptr}/verb"),
            "function verb",
        );
        out.non_empty(
            &f.noun,
            path.clone(),
            format!("{ptr}/noun"),
            "function noun",
        );
        if !index.rf_up.contains_key(&f.id) {
            out.warning(
                FindingCode::OrphanFunction,
                path,
                ptr,
                format!("function {} is mapped to no requirement", f.id),
            );
        }
    }
    for (i, c) in model.components.iter().enumerate() {
        let ptr = format!("/components/{i}");
        check_id(out, ElementDomain::Component, &c.id, ptr.clone());
        let path = element_path(ElementDomain::Component, &c.id);
        out.non_empty(
            &c.name,
            path.clone(),
            format!("{ptr}/name"),
            "component name",
        );
        if !index.fc_up.contains_key(&c.id) {
            out.warning(
                FindingCode::OrphanComponent,
                path,
                ptr,
                format!("component {} is mapped to no function", c.id),
            );
        }
    }

    for domain in ElementDomain::ALL {
        let key = match domain {
            ElementDomain::Requirement => "requirements",
            ElementDomain::Function => "functions",
            ElementDomain::Component => "components",
        };
        for (i, id) in model.element_ids(domain).into_iter().enumerate() {
            if index.modes_of(id).is_empty() {
                out.warning(
                    FindingCode::NoFailureModes,
                    element_path(domain, id),
                    format!("/{key}/{i}"),
                    format!("{domain} {id} has no failure modes"),
                );
            }
        }
    }
}

fn check_edges(model: &DesignModel, index: &ModelIndex<'_>, out: &mut Collector) {
    let matrices = [
        (
            "rf",
            &model.rf,
            ElementDomain::Requirement,
            ElementDomain::Function,
        ),
        (
            "fc",
            &model.fc,
            ElementDomain::Function,
            ElementDomain::Component,
        ),
    ];
    for (key, edges, from_domain, to_domain) in matrices {
        let mut seen: BTreeSet<&MappingEdge> = BTreeSet::new();
        for (i, edge) in edges.iter().enumerate() {
            let path = format!("{key}:{}->{}", edge.from, edge.to);
            let ptr = format!("/{key}/{i}");
            let mut dangling = false;
            for (slot, id) in [(0, &edge.from), (1, &edge.to)] {
                if index.domain(id).is_none() {
                    dangling = true;
                    out.error(
                        FindingCode::DanglingReference,
                        path.clone(),
                        format!("{ptr}/{slot}"),
                        format!("{key} edge refers to unknown element {id}"),
                    );
                }
            }
            if !dangling && !(index.is(&edge.from, from_domain) && index.is(&edge.to, to_domain)) {
                out.error(
                    FindingCode::EdgeDirection,
                    path.clone(),
                    ptr.clone(),
                    format!(
                        "{key} edge must run {from_domain} -> {to_domain}, found {} -> {}",
                        index.domain(&edge.from).expect("resolved"),
                        index.domain(&edge.to).expect("resolved"),
                    ),
                );
            }
            if !seen.insert(edge) {
                out.error(
                    FindingCode::DuplicateEdge,
                    path,
                    ptr,
                    format!("{key} edge {} -> {} is repeated", edge.from, edge.to),
                );
            }
        }
    }
}

fn check_failure_mode(i: usize, fm: &FailureMode, index: &ModelIndex<'_>, out: &mut Collector) {
    let path = fm_path(fm);
    let ptr = format!("/failure_modes/{i}");
    let owner_domain = index.domain(&fm.element);

    out.non_empty(
        &fm.description,
        path.clone(),
        format!("{ptr}/description"),
        "failure mode description",
    );

    match owner_domain {
        None => out.error(
            FindingCode::DanglingReference,
            path.clone(),
            format!("{ptr}/element"),
            format!("failure mode refers to unknown element {}", fm.element),
        ),
        Some(domain) if domain != fm.category.domain() => out.error(
            FindingCode::CategoryDomainMismatch,
            path.clone(),
            format!("{ptr}/category"),
            format!(
                "category {} is a {} failure mode but {} is a {domain}",
                fm.category,
                fm.category.domain(),
                fm.element
            ),
        ),
        Some(_) => {}
    }
    let domain = owner_domain.unwrap_or(fm.category.domain());

    for (k, effect) in fm.effects.iter().enumerate() {
        let epath = format!("{path}/effects[{k}]");
        let eptr = format!("{ptr}/effects/{k}");
        out.non_empty(
            &effect.text,
            epath.clone(),
            format!("{eptr}/text"),
            "effect text",
        );
        if let Some(class) = effect.severity_class {
            if class.domain() != domain {
                out.error(
                    FindingCode::SeverityClassDomainMismatch,
                    epath.clone(),
                    format!("{eptr}/severity_class"),
                    format!(
                        "severity class {class} belongs to the {} column, not {domain}",
                        class.domain()
                    ),
                );
            }
            if let Some(rank) = effect.severity_rank {
                let band = severity_band(class);
                if !rank_consistent(rank, band) {
                    out.error(
                        FindingCode::SeverityBandMismatch,
                        epath.clone(),
                        format!("{eptr}/severity_rank"),
                        format!("severity rank {rank} is outside band {band} of {class}"),
                    );
                }
            }
        }
    }

    for (k, cause) in fm.causes.iter().enumerate() {
        let cpath = format!("{path}/causes[{k}]");
        let cptr = format!("{ptr}/causes/{k}");
        out.non_empty(
            &cause.text,
            cpath.clone(),
            format!("{cptr}/text"),
            "cause text",
        );
        if let (Some(rank), Some(freq)) = (cause.occurrence_rank, cause.frequency) {
            let band = occurrence_band(freq);
            if !rank_consistent(rank, band) {
                out.error(
                    FindingCode::OccurrenceBandMismatch,
                    cpath,
                    format!("{cptr}/occurrence_rank"),
                    format!("occurrence rank {rank} is outside band {band} of frequency {freq}"),
                );
            }
        }
    }

    if let Some(control) = &fm.control {
        if let Some(text) = &control.method_text {
            out.non_empty(
                text,
                format!("{path}/control"),
                format!("{ptr}/control/method_text"),
                "control method text",
            );
        }
        if let Some(rank) = control.detection_rank {
            let band = detection_band(control.method_class);
            if !rank_consistent(rank, band) {
                out.error(
                    FindingCode::DetectionBandMismatch,
                    format!("{path}/control"),
                    format!("{ptr}/control/detection_rank"),
                    format!(
                        "detection rank {rank} is outside band {band} of {}",
                        control.method_class
                    ),
                );
            }
        }
    }

    if domain != ElementDomain::Component {
        if fm.effects.is_empty() {
            out.warning(
                FindingCode::EmptyEffects,
                path.clone(),
                ptr.clone(),
                format!("{domain} failure mode lists no effects"),
            );
        }
        if fm.causes.is_empty() {
            out.warning(
                FindingCode::EmptyCauses,
                path,
                ptr,
                format!("{domain} failure mode lists no causes"),
            );
        }
    }
}

fn check_duplicate_failure_modes(model: &DesignModel, out: &mut Collector) {
    let mut seen = HashSet::new();
    for (i, fm) in model.failure_modes.iter().enumerate() {
        if !seen.insert(&fm.id) {
            out.error(
                FindingCode::DuplicateId,
                fm_path(fm),
                format!("/failure_modes/{i}/id"),
                format!("failure mode id {} is declared more than once", fm.id),
            );
        }
    }
}

fn check_analysis_ready(model: &DesignModel, index: &ModelIndex<'_>, out: &mut Collector) {
    let severity_rated = |fm: &FailureMode| fm.effects.iter().any(|e| effect_rank(e).is_some());

    // Elements that receive a severity from their own modes or from upstream.
    let has_severity = |id: &ElementId| -> bool {
        let own = |x: &ElementId| index.modes_of(x).iter().any(|fm| severity_rated(fm));
        own(id) || index.above(id).any(|f| own(f) || index.above(f).any(own))
    };
    // Elements that can reach a component carrying failure modes.
    let reaches_rated_component = |id: &ElementId| -> bool {
        let comp = |c: &ElementId| {
            index.domain(c) == Some(ElementDomain::Component) && !index.modes_of(c).is_empty()
        };
        index.below(id).any(|x| comp(x) || index.below(x).any(comp))
    };

    for (i, fm) in model.failure_modes.iter().enumerate() {
        let Some(domain) = index.domain(&fm.element) else {
            continue;
        };
        let path = fm_path(fm);
        let ptr = format!("/failure_modes/{i}");
        match domain {
            ElementDomain::Component => {
                if !severity_rated(fm) {
                    out.error(
                        FindingCode::MissingSeverityRating,
                        path.clone(),
                        format!("{ptr}/effects"),
                        "component failure mode needs an effect with a severity rank or class"
                            .into(),
                    );
                }
                if !fm.causes.iter().any(|c| cause_rank(c).is_some()) {
                    out.error(
                        FindingCode::MissingOccurrenceRating,
                        path.clone(),
                        format!("{ptr}/causes"),
                        "component failure mode needs a cause with an occurrence rank or frequency"
                            .into(),
                    );
                }
                if fm.control.as_ref().map(control_rank).is_none() {
                    out.error(
                        FindingCode::MissingDetectionRating,
                        path,
                        ptr,
                        "component failure mode needs a control plan".into(),
                    );
                }
            }
            ElementDomain::Requirement | ElementDomain::Function => {
                if domain == ElementDomain::Requirement && !severity_rated(fm) {
                    out.error(
                        FindingCode::MissingSeverityRating,
                        path.clone(),
                        format!("{ptr}/effects"),
                        "requirement failure mode needs an effect with a severity rank or class"
                            .into(),
                    );
                }
                if domain == ElementDomain::Function
                    && !severity_rated(fm)
                    && !has_severity(&fm.element)
                {
                    out.error(
                        FindingCode::UnresolvableSeverity,
                        path.clone(),
                        format!("{ptr}/effects"),
                        format!(
                            "no severity can be derived: the failure mode is unrated and {} inherits none",
                            fm.element
                        ),
                    );
                }
                if !reaches_rated_component(&fm.element) {
                    out.error(
                        FindingCode::UnresolvableOccurrence,
                        path,
                        ptr,
                        format!(
                            "no occurrence can be derived: {} maps to no component with failure modes",
                            fm.element
                        ),
                    );
                }
            }
        }
    }
}
