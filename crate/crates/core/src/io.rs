//! Reading and writing the JSON model document.
//!
//! The schema is closed: unknown keys are rejected. Structural validation runs
//! as part of parsing and its errors are reported with the line and column of
//! the offending value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    Cause, Component, ControlPlan, DesignModel, Effect, ElementDomain, ElementId, FailureCategory,
    FailureMode, Flow, Frequency, Function, MappingEdge, Meta, Rank, Requirement,
};
use crate::rating::{ControlMethod, SeverityClass};
use crate::validate::{validate_model, Strictness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line.
    pub line: usize,
    /// 1-based byte column within the line.
    pub column: usize,
    pub code: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, self.code, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    meta: Meta,
    requirements: Vec<RequirementDoc>,
    functions: Vec<FunctionDoc>,
    components: Vec<ComponentDoc>,
    rf: Vec<(ElementId, ElementId)>,
    fc: Vec<(ElementId, ElementId)>,
    failure_modes: Vec<FailureModeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequirementDoc {
    id: ElementId,
    text: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDoc {
    id: ElementId,
    verb: String,
    noun: String,
    #[serde(default)]
    inputs: Vec<Flow>,
    #[serde(default)]
    outputs: Vec<Flow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    id: ElementId,
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    concept: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FailureModeDoc {
    id: ElementId,
    element: ElementId,
    category: String,
    description: String,
    #[serde(default)]
    effects: Vec<EffectDoc>,
    #[serde(default)]
    causes: Vec<CauseDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control: Option<ControlDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EffectDoc {
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    severity_class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    severity_rank: Option<Rank>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CauseDoc {
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    occurrence_rank: Option<Rank>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frequency: Option<Frequency>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlDoc {
    method_class: ControlMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    method_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detection_rank: Option<Rank>,
}

/// Parses a model document. On failure every problem found is returned,
/// ordered by position.
pub fn parse_model(text: &str) -> Result<DesignModel, Vec<ParseError>> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| vec![from_serde(text, &e)])?;

    let mut problems: Vec<(String, String, String)> = Vec::new();
    let model = from_doc(doc, &mut problems);

    let report = validate_model(&model, Strictness::Structural);
    problems.extend(report.errors().map(|f| {
        (
            f.pointer.clone(),
            f.code.token().to_string(),
            format!("{}: {}", f.path, f.message),
        )
    }));
    if problems.is_empty() {
        return Ok(model);
    }
    let mut errors: Vec<ParseError> = problems
        .into_iter()
        .map(|(pointer, code, message)| {
            let (line, column) = line_column(text, locate(text, &pointer));
            ParseError {
                line,
                column,
                code,
                message,
            }
        })
        .collect();
    errors.sort_by(|a, b| (a.line, a.column, &a.code).cmp(&(b.line, b.column, &b.code)));
    Err(errors)
}

/// Canonical document: fixed key order, two-space indentation, LF line
/// endings and a trailing newline.
pub fn serialize_model(model: &DesignModel) -> String {
    let mut out =
        serde_json::to_string_pretty(&to_doc(model)).expect("model documents always serialize");
    out.push('\n');
    out
}

fn from_serde(text: &str, err: &serde_json::Error) -> ParseError {
    use serde_json::error::Category;
    let full = err.to_string();
    let message = match full.rfind(" at line ") {
        Some(i) => full[..i].to_string(),
        None => full,
    };
    let code = match err.classify() {
        Category::Syntax | Category::Io => "Syntax",
        Category::Eof => "UnexpectedEof",
        Category::Data if message.starts_with("unknown field") => "UnknownKey",
        Category::Data if message.starts_with("missing field") => "MissingField",
        Category::Data
            if message.starts_with("invalid type") || message.starts_with("invalid length") =>
        {
            "WrongType"
        }
        Category::Data => "InvalidValue",
    };
    let (line, column) = clamp_position(text, err.line(), err.column());
    ParseError {
        line,
        column,
        code: code.to_string(),
        message,
    }
}

fn clamp_position(text: &str, line: usize, column: usize) -> (usize, usize) {
    let lines: Vec<&str> = text.split('\n').collect();
    let line = line.clamp(1, lines.len().max(1));
    let width = lines.get(line - 1).map_or(0, |l| l.len());
    (line, column.clamp(1, width.max(1)))
}

fn resolve_category(token: &str, owner: Option<ElementDomain>) -> Option<FailureCategory> {
    if let Some(domain) = owner {
        if let Some(category) = FailureCategory::parse(domain, token) {
            return Some(category);
        }
    }
    // Keep a mismatched category so validation can report it precisely.
    FailureCategory::domains_of(token)
        .first()
        .and_then(|&d| FailureCategory::parse(d, token))
}

fn resolve_severity_class(token: &str, domain: ElementDomain) -> Option<SeverityClass> {
    SeverityClass::parse(domain, token).or_else(|| {
        ElementDomain::ALL
            .into_iter()
            .find_map(|d| SeverityClass::parse(d, token))
    })
}

fn from_doc(doc: ModelDoc, problems: &mut Vec<(String, String, String)>) -> DesignModel {
    let mut model = DesignModel {
        meta: doc.meta,
        requirements: doc
            .requirements
            .into_iter()
            .map(|r| Requirement {
                id: r.id,
                text: r.text,
            })
            .collect(),
        functions: doc
            .functions
            .into_iter()
            .map(|f| Function {
                id: f.id,
                verb: f.verb,
                noun: f.noun,
                inputs: f.inputs,
                outputs: f.outputs,
            })
            .collect(),
        components: doc
            .components
            .into_iter()
            .map(|c| Component {
                id: c.id,
                name: c.name,
                concept: c.concept,
            })
            .collect(),
        rf: doc
            .rf
            .into_iter()
            .map(|(a, b)| MappingEdge::new(a, b))
            .collect(),
        fc: doc
            .fc
            .into_iter()
            .map(|(a, b)| MappingEdge::new(a, b))
            .collect(),
        failure_modes: Vec::new(),
    };

    for (i, fm) in doc.failure_modes.into_iter().enumerate() {
        let owner = model.element_domain(&fm.element).ok();
        let Some(category) = resolve_category(&fm.category, owner) else {
            let expected = owner
                .map(|d| {
                    crate::model::allowed_categories(d)
                        .iter()
                        .map(|c| c.token())
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .unwrap_or_else(|| "a failure-mode category".into());
            problems.push((
                format!("/failure_modes/{i}/category"),
                "UnknownCategory".into(),
                format!(
                    "failure_mode:{}: unknown category {:?}, expected {expected}",
                    fm.id, fm.category
                ),
            ));
            continue;
        };
        let domain = owner.unwrap_or(category.domain());

        let mut effects = Vec::with_capacity(fm.effects.len());
        for (k, e) in fm.effects.into_iter().enumerate() {
            let severity_class = match e.severity_class {
                None => None,
                Some(token) => match resolve_severity_class(&token, domain) {
                    Some(class) => Some(class),
                    None => {
                        problems.push((
                            format!("/failure_modes/{i}/effects/{k}/severity_class"),
                            "UnknownSeverityClass".into(),
                            format!(
                                "failure_mode:{}/effects[{k}]: unknown severity class {token:?}, expected one of {}",
                                fm.id,
                                SeverityClass::all(domain)
                                    .iter()
                                    .map(|c| c.token())
                                    .collect::<Vec<_>>()
                                    .join(", ")
                            ),
                        ));
                        None
                    }
                },
            };
            effects.push(Effect {
                text: e.text,
                severity_class,
                severity_rank: e.severity_rank,
            });
        }

        model.failure_modes.push(FailureMode {
            id: fm.id,
            element: fm.element,
            category,
            description: fm.description,
            effects,
            causes: fm
                .causes
                .into_iter()
                .map(|c| Cause {
                    text: c.text,
                    occurrence_rank: c.occurrence_rank,
                    frequency: c.frequency,
                })
                .collect(),
            control: fm.control.map(|c| ControlPlan {
                method_class: c.method_class,
                method_text: c.method_text,
                detection_rank: c.detection_rank,
            }),
        });
    }
    model
}

fn to_doc(model: &DesignModel) -> ModelDoc {
    ModelDoc {
        meta: model.meta.clone(),
        requirements: model
            .requirements
            .iter()
            .map(|r| RequirementDoc {
                id: r.id.clone(),
                text: r.text.clone(),
            })
            .collect(),
        functions: model
            .functions
            .iter()
            .map(|f| FunctionDoc {
                id: f.id.clone(),
                verb: f.verb.clone(),
                noun: f.noun.clone(),
                inputs: f.inputs.clone(),
                outputs: f.outputs.clone(),
            })
            .collect(),
        components: model
            .components
            .iter()
            .map(|c| ComponentDoc {
                id: c.id.clone(),
                name: c.name.clone(),
                concept: c.concept.clone(),
            })
            .collect(),
        rf: model
            .rf
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .collect(),
        fc: model
            .fc
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .collect(),
        failure_modes: model
            .failure_modes
            .iter()
            .map(|fm| FailureModeDoc {
                id: fm.id.clone(),
                element: fm.element.clone(),
                category: fm.category.token().to_string(),
                description: fm.description.clone(),
                effects: fm
                    .effects
                    .iter()
                    .map(|e| EffectDoc {
                        text: e.text.clone(),
                        severity_class: e.severity_class.map(|c| c.token().to_string()),
                        severity_rank: e.severity_rank,
                    })
                    .collect(),
                causes: fm
                    .causes
                    .iter()
                    .map(|c| CauseDoc {
                        text: c.text.clone(),
                        occurrence_rank: c.occurrence_rank,
                        frequency: c.frequency,
                    })
                    .collect(),
                control: fm.control.as_ref().map(|c| ControlDoc {
                    method_class: c.method_class,
                    method_text: c.method_text.clone(),
                    detection_rank: c.detection_rank,
                }),
            })
            .collect(),
    }
}

/// 1-based line and column of the value a JSON pointer addresses, falling
/// back to its deepest existing ancestor.
pub fn pointer_position(text: &str, pointer: &str) -> (usize, usize) {
    line_column(text, locate(text, pointer))
}

/// Byte offset of the value addressed by a JSON pointer, or of its deepest
/// existing ancestor. `text` must be syntactically valid JSON.
fn locate(text: &str, pointer: &str) -> usize {
    let mut scan = Scanner {
        bytes: text.as_bytes(),
        pos: 0,
    };
    scan.skip_ws();
    let mut found = scan.pos;
    for segment in pointer.split('/').skip(1) {
        match scan.enter(segment) {
            Some(pos) => found = pos,
            None => break,
        }
    }
    found
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = before
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |p| p + 1);
    clamp_position(text, line, offset - line_start + 1)
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Scanner<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    /// Consumes a string literal and returns its raw (still escaped) body.
    fn string(&mut self) -> &[u8] {
        let start = self.pos + 1;
        self.pos += 1;
        while let Some(b) = self.peek() {
            match b {
                b'\\' => self.pos += 2,
                b'"' => {
                    self.pos += 1;
                    return &self.bytes[start..self.pos - 1];
                }
                _ => self.pos += 1,
            }
        }
        &self.bytes[start..]
    }

    fn skip_value(&mut self) {
        self.skip_ws();
        match self.peek() {
            Some(b'"') => {
                self.string();
            }
            Some(open @ (b'{' | b'[')) => {
                let close = if open == b'{' { b'}' } else { b']' };
                self.pos += 1;
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b) if b == close => {
                            self.pos += 1;
                            return;
                        }
                        Some(b',') | Some(b':') => self.pos += 1,
                        None => return,
                        _ => self.skip_value(),
                    }
                }
            }
            _ => {
                while !matches!(
                    self.peek(),
                    None | Some(b',' | b']' | b'}' | b' ' | b'\t' | b'\n' | b'\r')
                ) {
                    self.pos += 1;
                }
            }
        }
    }

    /// Moves from the start of a container value to the start of its child
    /// `segment`; returns the child's offset.
    fn enter(&mut self, segment: &str) -> Option<usize> {
        self.skip_ws();
        match self.peek()? {
            b'{' => {
                self.pos += 1;
                loop {
                    self.skip_ws();
                    match self.peek()? {
                        b'}' => return None,
                        b',' => self.pos += 1,
                        b'"' => {
                            let key = self.string() == segment.as_bytes();
                            self.skip_ws();
                            if self.peek()? == b':' {
                                self.pos += 1;
                            }
                            self.skip_ws();
                            if key {
                                return Some(self.pos);
                            }
                            self.skip_value();
                        }
                        _ => return None,
                    }
                }
            }
            b'[' => {
                let wanted: usize = segment.parse().ok()?;
                self.pos += 1;
                let mut index = 0;
                loop {
                    self.skip_ws();
                    match self.peek()? {
                        b']' => return None,
                        b',' => self.pos += 1,
                        _ => {
                            if index == wanted {
                                return Some(self.pos);
                            }
                            self.skip_value();
                            index += 1;
                        }
                    }
                }
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const MINIMAL: &str = r#"{
  "meta": {"product": "p", "version": "1"},
  "requirements": [{"id": "r1", "text": "do it"}],
  "functions": [{"id": "f1", "verb": "do", "noun": "it"}],
  "components": [{"id": "c1", "name": "doer"}],
  "rf": [["r1", "f1"]],
  "fc": [["f1", "c1"]],
  "failure_modes": []
}"#;

    #[test]
    fn minimal_document() {
        let model = parse_model(MINIMAL).unwrap();
        assert_eq!(model.dimensions(), (1, 1, 1));
        assert!(model.functions[0].inputs.is_empty());
    }

    #[test]
    fn reversed_edge_reports_direction() {
        let text = MINIMAL.replace(r#"[["r1", "f1"]]"#, r#"[["f1", "r1"]]"#);
        let errors = parse_model(&text).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].code, "EdgeDirection");
        assert_eq!((errors[0].line, errors[0].column), (6, 10));
    }

    #[test]
    fn component_mode_with_requirement_category() {
        let text = MINIMAL.replace(
            r#""failure_modes": []"#,
            r#""failure_modes": [
    {"id": "fm1", "element": "c1", "category": "Intermittence", "description": "x"}
  ]"#,
        );
        let errors = parse_model(&text).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].code, "CategoryDomainMismatch");
        assert!(errors[0].message.contains("failure_mode:fm1"));
        assert_eq!(errors[0].line, 9);
        let col = errors[0].column;
        assert_eq!(
            &text.lines().nth(8).unwrap()[col - 1..col + 14],
            "\"Intermittence\""
        );
    }

    #[test]
    fn unknown_category_and_class() {
        let text = MINIMAL.replace(
            r#""failure_modes": []"#,
            r#""failure_modes": [
    {"id": "fm1", "element": "c1", "category": "Exploded", "description": "x"},
    {"id": "fm2", "element": "c1", "category": "Damaged", "description": "x",
     "effects": [{"text": "y", "severity_class": "Catastrophic"}]}
  ]"#,
        );
        let codes: Vec<_> = parse_model(&text)
            .unwrap_err()
            .into_iter()
            .map(|e| e.code)
            .collect();
        assert_eq!(codes, ["UnknownCategory", "UnknownSeverityClass"]);
    }

    #[test]
    fn schema_errors_carry_positions() {
        let unknown = MINIMAL.replace(r#""text": "do it""#, r#""text": "do it", "txet": 1"#);
        let err = &parse_model(&unknown).unwrap_err()[0];
        assert_eq!(err.code, "UnknownKey");
        assert_eq!(err.line, 3);

        let missing = MINIMAL.replace(r#", "name": "doer""#, "");
        assert_eq!(parse_model(&missing).unwrap_err()[0].code, "MissingField");

        let wrong = MINIMAL.replace(r#""version": "1""#, r#""version": 1"#);
        assert_eq!(parse_model(&wrong).unwrap_err()[0].code, "WrongType");

        let rank = MINIMAL.replace(
            r#""failure_modes": []"#,
            r#""failure_modes": [{"id": "fm1", "element": "c1", "category": "Damaged",
  "description": "x", "effects": [{"text": "y", "severity_rank": 11}]}]"#,
        );
        let err = &parse_model(&rank).unwrap_err()[0];
        assert_eq!(err.code, "InvalidValue");
        assert!(err.message.contains("outside 1..=10"), "{}", err.message);

        let bad_id = MINIMAL.replace(r#""id": "c1""#, r#""id": "c 1""#);
        assert_eq!(parse_model(&bad_id).unwrap_err()[0].code, "InvalidValue");
    }

    #[test]
    fn syntax_errors_stay_inside_document() {
        for text in ["", "{", "{\"meta\": }", "[1, 2", "\n\n   "] {
            let errors = parse_model(text).unwrap_err();
            let e = &errors[0];
            assert!(e.line >= 1 && e.column >= 1);
            assert!(e.line <= text.split('\n').count(), "{text:?} -> {e}");
        }
    }

    #[test]
    fn canonical_serialization() {
        let model = fixtures::camera_model();
        let text = serialize_model(&model);
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
        assert!(text.starts_with("{\n  \"meta\": {\n    \"product\""));
        assert_eq!(parse_model(&text).unwrap(), model);
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), text);
    }

    #[test]
    fn unicode_prose_round_trips() {
        let mut model = fixtures::camera_model();
        model.failure_modes[0].description = "Kamera-Modul beschädigt".into();
        let text = serialize_model(&model);
        assert!(text.contains("Kamera-Modul beschädigt"));
        assert_eq!(parse_model(&text).unwrap(), model);
    }

    #[test]
    fn frequencies_are_integer_pairs() {
        let model = fixtures::smartphone_model();
        let text = serialize_model(&model);
        assert!(text.contains("\"frequency\": [\n"));
        assert_eq!(parse_model(&text).unwrap(), model);
    }

    #[test]
    fn locate_walks_pointers() {
        let text = r#"{"a": [1, {"b": "x\"y", "c": [true, null]}], "d": 2}"#;
        assert_eq!(&text[locate(text, "/a/1/c/1")..][..4], "null");
        assert_eq!(&text[locate(text, "/d")..][..1], "2");
        // missing segment falls back to the deepest ancestor
        assert_eq!(&text[locate(text, "/a/1/zz")..][..1], "{");
    }
}
