//! FMEA worksheets per domain, risk-consequence priority reports, and the
//! end-to-end procedure that produces them.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{
    analyze_with, forward_severity, AnalysisOptions, AnalysisResult, SeverityMap,
};
use crate::error::{AnalysisError, ProcedureError};
use crate::model::{DesignModel, ElementDomain, ElementId, Rank};
use crate::validate::{
    validate_model, Finding, FindingCode, FindingSeverity, Strictness, ValidationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl Format {
    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "csv" => Some(Format::Csv),
            "md" => Some(Format::Markdown),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
            Format::Json => "json",
        }
    }
}

pub const FMEA_COLUMNS: [&str; 13] = [
    "element_id",
    "element_text",
    "fm_id",
    "category",
    "description",
    "effects",
    "severity",
    "causes",
    "occurrence",
    "control",
    "detection",
    "rpn",
    "rank",
];

pub const PRIORITY_COLUMNS: [&str; 4] = ["element_id", "element_text", "severity", "priority"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FmeaRow {
    pub element_id: ElementId,
    pub element_text: String,
    pub fm_id: ElementId,
    pub category: String,
    pub description: String,
    /// Effect texts joined by `"; "` in declaration order.
    pub effects: String,
    pub severity: Rank,
    pub causes: String,
    pub occurrence: Rank,
    /// Control method text, the method class when no text is given, or `-`.
    pub control: String,
    pub detection: Option<Rank>,
    pub rpn: u16,
    pub rank: usize,
}

impl FmeaRow {
    fn cells(&self) -> [String; 13] {
        [
            self.element_id.to_string(),
            self.element_text.clone(),
            self.fm_id.to_string(),
            self.category.clone(),
            self.description.clone(),
            self.effects.clone(),
            self.severity.to_string(),
            self.causes.clone(),
            self.occurrence.to_string(),
            self.control.clone(),
            self.detection.map_or_else(|| "-".into(), |d| d.to_string()),
            self.rpn.to_string(),
            self.rank.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FmeaDocument {
    pub domain: ElementDomain,
    pub rows: Vec<FmeaRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PriorityRow {
    pub element_id: ElementId,
    pub element_text: String,
    pub severity: Option<Rank>,
    pub priority: usize,
}

impl PriorityRow {
    fn cells(&self) -> [String; 4] {
        [
            self.element_id.to_string(),
            self.element_text.clone(),
            self.severity.map_or_else(|| "-".into(), |s| s.to_string()),
            self.priority.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PriorityReport {
    pub domain: ElementDomain,
    pub rows: Vec<PriorityRow>,
    #[serde(skip)]
    pub warnings: Vec<Finding>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactBundle {
    pub requirement_priority: PriorityReport,
    pub function_priority: PriorityReport,
    pub component_fmea: FmeaDocument,
    pub function_fmea: FmeaDocument,
    pub requirement_fmea: FmeaDocument,
    pub validation: ValidationReport,
    pub analysis: AnalysisResult,
}

impl ArtifactBundle {
    pub fn documents(&self) -> [&FmeaDocument; 3] {
        [
            &self.component_fmea,
            &self.function_fmea,
            &self.requirement_fmea,
        ]
    }

    /// The five artifacts as `(file name, contents)`, in procedure order.
    pub fn artifacts(&self, format: Format) -> Vec<(String, String)> {
        let ext = format.extension();
        vec![
            (
                format!("requirement_priority.{ext}"),
                emit_priority_report(&self.requirement_priority, format),
            ),
            (
                format!("function_priority.{ext}"),
                emit_priority_report(&self.function_priority, format),
            ),
            (
                format!("fmea_component.{ext}"),
                emit_fmea_document(&self.component_fmea, format),
            ),
            (
                format!("fmea_function.{ext}"),
                emit_fmea_document(&self.function_fmea, format),
            ),
            (
                format!("fmea_requirement.{ext}"),
                emit_fmea_document(&self.requirement_fmea, format),
            ),
        ]
    }

    pub fn write_to(&self, dir: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, contents) in self.artifacts(format) {
            let path = dir.join(name);
            fs::write(&path, contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Ranks elements of `domain` by propagated severity, highest first, ties by
/// id. Elements missing from `severity` come last, unrated, with a warning.
pub fn risk_consequence_report(
    model: &DesignModel,
    severity: &SeverityMap,
    domain: ElementDomain,
) -> PriorityReport {
    let mut rated = Vec::new();
    let mut unrated = Vec::new();
    for id in model.element_ids(domain) {
        match severity.get(id) {
            Some(&s) => rated.push((id, Some(s))),
            None => unrated.push((id, None)),
        }
    }
    rated.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    unrated.sort_by(|a, b| a.0.cmp(b.0));

    let warnings = unrated
        .iter()
        .map(|(id, _)| Finding {
            severity: FindingSeverity::Warning,
            code: FindingCode::UnratedElement,
            message: format!("{domain} {id} has no severity and is listed last"),
            path: format!("{domain}:{id}"),
            pointer: String::new(),
        })
        .collect();
    let rows = rated
        .into_iter()
        .chain(unrated)
        .enumerate()
        .map(|(i, (id, s))| PriorityRow {
            element_id: id.clone(),
            element_text: model.element_text(id).unwrap_or_default(),
            severity: s,
            priority: i + 1,
        })
        .collect();
    PriorityReport {
        domain,
        rows,
        warnings,
    }
}

/// One domain's worksheet, rows in analysis priority order and ranked
/// within the document.
pub fn fmea_document(
    model: &DesignModel,
    analysis: &AnalysisResult,
    domain: ElementDomain,
) -> FmeaDocument {
    let rows = analysis
        .rows
        .iter()
        .filter(|row| row.domain == domain)
        .enumerate()
        .map(|(i, row)| {
            let fm = model
                .failure_mode(&row.failure_mode)
                .expect("analysis rows come from the model");
            let join = |texts: Vec<&str>| texts.join("; ");
            FmeaRow {
                element_id: row.element.clone(),
                element_text: model.element_text(&row.element).unwrap_or_default(),
                fm_id: fm.id.clone(),
                category: fm.category.token().to_string(),
                description: fm.description.clone(),
                effects: join(fm.effects.iter().map(|e| e.text.as_str()).collect()),
                severity: row.severity,
                causes: join(fm.causes.iter().map(|c| c.text.as_str()).collect()),
                occurrence: row.occurrence,
                control: fm.control.as_ref().map_or_else(
                    || "-".to_string(),
                    |c| {
                        c.method_text
                            .clone()
                            .unwrap_or_else(|| c.method_class.token().to_string())
                    },
                ),
                detection: row.detection,
                rpn: row.rpn,
                rank: i + 1,
            }
        })
        .collect();
    FmeaDocument { domain, rows }
}

/// Quotes a field when it contains a comma, quote, CR or LF; embedded quotes
/// are doubled.
fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_table<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn md_cell(field: &str) -> String {
    field
        .replace('\\', "\\\\")
        .replace('|', "\\|")
        .replace("\r\n", "<br>")
        .replace('\n', "<br>")
}

fn md_table<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", " --- |".repeat(N));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| md_cell(c)).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report documents always serialize");
    out.push('\n');
    out
}

pub fn emit_fmea_document(doc: &FmeaDocument, format: Format) -> String {
    let rows = doc.rows.iter().map(FmeaRow::cells);
    match format {
        Format::Csv => csv_table(FMEA_COLUMNS, rows),
        Format::Markdown => md_table(FMEA_COLUMNS, rows),
        Format::Json => json_text(doc),
    }
}

pub fn emit_priority_report(report: &PriorityReport, format: Format) -> String {
    let rows = report.rows.iter().map(PriorityRow::cells);
    match format {
        Format::Csv => csv_table(PRIORITY_COLUMNS, rows),
        Format::Markdown => md_table(PRIORITY_COLUMNS, rows),
        Format::Json => json_text(report),
    }
}

/// Procedure step at which an analysis error surfaces, by the failing
/// failure mode's domain.
fn step_of(model: &DesignModel, err: &AnalysisError) -> u8 {
    let domain = err
        .failure_mode()
        .and_then(|id| model.failure_mode(id))
        .and_then(|fm| model.element_domain(&fm.element).ok());
    match (err, domain) {
        (AnalysisError::MissingSeverity(_), Some(ElementDomain::Requirement)) => 2,
        (AnalysisError::MissingSeverity(_), Some(ElementDomain::Function)) => 4,
        (_, Some(ElementDomain::Function)) => 6,
        (_, Some(ElementDomain::Requirement)) => 7,
        _ => 5,
    }
}

pub fn run_procedure(model: &DesignModel) -> Result<ArtifactBundle, ProcedureError> {
    run_procedure_with(model, AnalysisOptions::default())
}

/// Validates, then produces the requirement and function priority reports
/// and the component, function and requirement worksheets.
pub fn run_procedure_with(
    model: &DesignModel,
    options: AnalysisOptions,
) -> Result<ArtifactBundle, ProcedureError> {
    let structural = validate_model(model, Strictness::Structural);
    if structural.has_errors() {
        return Err(ProcedureError::ValidationFailed(structural));
    }
    let validation = validate_model(model, Strictness::AnalysisReady);
    if validation.has_errors() {
        return Err(ProcedureError::ValidationFailed(validation));
    }
    let fail = |source: AnalysisError| ProcedureError::Analysis {
        step: step_of(model, &source),
        source,
    };

    // Steps 2 and 4: severity reasoning and risk consequences.
    let severity = forward_severity(model).map_err(fail)?;
    let requirement_priority =
        risk_consequence_report(model, &severity, ElementDomain::Requirement);
    let function_priority = risk_consequence_report(model, &severity, ElementDomain::Function);

    // Steps 5-7: detection and occurrence, then the three worksheets.
    let analysis = analyze_with(model, options).map_err(fail)?;
    debug_assert_eq!(analysis.severity, severity);
    let component_fmea = fmea_document(model, &analysis, ElementDomain::Component);
    let function_fmea = fmea_document(model, &analysis, ElementDomain::Function);
    let requirement_fmea = fmea_document(model, &analysis, ElementDomain::Requirement);

    Ok(ArtifactBundle {
        requirement_priority,
        function_priority,
        component_fmea,
        function_fmea,
        requirement_fmea,
        validation,
        analysis,
    })
}
