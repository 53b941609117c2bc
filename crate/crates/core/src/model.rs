//! Design model: requirements, functions, components, their mappings, and
//! the failure modes recorded against each element.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::rating::{ControlMethod, SeverityClass};

/// Analyst-chosen identifier: letters, digits, `_` and `-`, case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ElementId(String);

impl ElementId {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        let valid = !value.is_empty()
            && value
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if valid {
            Ok(Self(value))
        } else {
            Err(ModelError::InvalidId(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ElementId {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ElementId> for String {
    fn from(id: ElementId) -> Self {
        id.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ElementId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// The three classes of design element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementDomain {
    Requirement,
    Function,
    Component,
}

impl ElementDomain {
    pub const ALL: [ElementDomain; 3] = [
        ElementDomain::Requirement,
        ElementDomain::Function,
        ElementDomain::Component,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ElementDomain::Requirement => "requirement",
            ElementDomain::Function => "function",
            ElementDomain::Component => "component",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.as_str() == token)
    }
}

impl fmt::Display for ElementDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A 1..=10 rating used for severity, occurrence and detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Rank(pub(crate) u8);

impl Rank {
    pub const MIN: Rank = Rank(1);
    pub const MAX: Rank = Rank(10);

    pub fn new(value: i64) -> Result<Self, ModelError> {
        if (1..=10).contains(&value) {
            Ok(Rank(value as u8))
        } else {
            Err(ModelError::RankOutOfRange(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Every valid rank, ascending.
    pub fn all() -> impl Iterator<Item = Rank> {
        (1..=10).map(Rank)
    }
}

impl TryFrom<i64> for Rank {
    type Error = ModelError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Rank::new(value)
    }
}

impl From<Rank> for u8 {
    fn from(rank: Rank) -> Self {
        rank.0
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Failures per opportunities, kept as an exact ratio of positive integers.
///
/// Equality is structural (`1/20 != 2/40`) so that documents round-trip
/// exactly; use [`Frequency::cmp_value`] to compare magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u64; 2]", into = "[u64; 2]")]
pub struct Frequency {
    numerator: u64,
    denominator: u64,
}

impl Frequency {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self, ModelError> {
        if numerator == 0 || denominator == 0 {
            return Err(ModelError::InvalidFrequency {
                numerator,
                denominator,
            });
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    /// "1 in `n`".
    pub fn one_in(denominator: u64) -> Result<Self, ModelError> {
        Self::new(1, denominator)
    }

    pub fn numerator(self) -> u64 {
        self.numerator
    }

    pub fn denominator(self) -> u64 {
        self.denominator
    }

    /// Exact comparison of the rational values.
    pub fn cmp_value(self, other: Frequency) -> Ordering {
        let lhs = u128::from(self.numerator) * u128::from(other.denominator);
        let rhs = u128::from(other.numerator) * u128::from(self.denominator);
        lhs.cmp(&rhs)
    }
}

impl TryFrom<[u64; 2]> for Frequency {
    type Error = ModelError;

    fn try_from([n, d]: [u64; 2]) -> Result<Self, Self::Error> {
        Frequency::new(n, d)
    }
}

impl From<Frequency> for [u64; 2] {
    fn from(f: Frequency) -> Self {
        [f.numerator, f.denominator]
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub id: ElementId,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    Material,
    Energy,
    Information,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flow {
    pub description: String,
    pub kind: FlowKind,
}

/// A "verb + noun" design intent with its input and output flows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    pub id: ElementId,
    pub verb: String,
    pub noun: String,
    pub inputs: Vec<Flow>,
    pub outputs: Vec<Flow>,
}

impl Function {
    pub fn phrase(&self) -> String {
        format!("{} {}", self.verb, self.noun)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: ElementId,
    pub name: String,
    pub concept: Option<String>,
}

/// One `1` entry of the RF or FC matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MappingEdge {
    pub from: ElementId,
    pub to: ElementId,
}

impl MappingEdge {
    pub fn new(from: ElementId, to: ElementId) -> Self {
        Self { from, to }
    }
}

macro_rules! token_enum {
    ($(#[$meta:meta])* $name:ident { $($(#[$vmeta:meta])* $variant:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($(#[$vmeta])* $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => stringify!($variant)),+
                }
            }

            pub fn from_token(token: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|v| v.token() == token)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

pub(crate) use token_enum;

token_enum!(
    /// Ways a requirement can fail to be met.
    RequirementMode {
        Absence,
        Incompleteness,
        Intermittence,
        Incorrectness,
        ImproperOccurrence,
    }
);

token_enum!(
    /// Negations of a function's "verb + noun" intent.
    FunctionMode {
        Malfunction,
        Interference,
        Decayed,
        Incompleteness,
        Incorrectness,
    }
);

token_enum!(
    /// Failure manners of (electronic) components.
    ComponentMode {
        Damaged,
        LossOfEfficiency,
        EMI,
        NonCompatible,
    }
);

/// A failure-mode category together with the element domain it belongs to.
///
/// `Incompleteness` and `Incorrectness` exist for both requirements and
/// functions; the domain tag keeps them apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureCategory {
    Requirement(RequirementMode),
    Function(FunctionMode),
    Component(ComponentMode),
}

impl FailureCategory {
    pub fn domain(self) -> ElementDomain {
        match self {
            FailureCategory::Requirement(_) => ElementDomain::Requirement,
            FailureCategory::Function(_) => ElementDomain::Function,
            FailureCategory::Component(_) => ElementDomain::Component,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            FailureCategory::Requirement(m) => m.token(),
            FailureCategory::Function(m) => m.token(),
            FailureCategory::Component(m) => m.token(),
        }
    }

    pub fn parse(domain: ElementDomain, token: &str) -> Option<Self> {
        match domain {
            ElementDomain::Requirement => {
                RequirementMode::from_token(token).map(FailureCategory::Requirement)
            }
            ElementDomain::Function => {
                FunctionMode::from_token(token).map(FailureCategory::Function)
            }
            ElementDomain::Component => {
                ComponentMode::from_token(token).map(FailureCategory::Component)
            }
        }
    }

    /// Domains whose enumeration contains `token`, in requirement, function,
    /// component order.
    pub fn domains_of(token: &str) -> Vec<ElementDomain> {
        ElementDomain::ALL
            .into_iter()
            .filter(|&d| Self::parse(d, token).is_some())
            .collect()
    }
}

impl fmt::Display for FailureCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The fixed failure-mode enumeration for `domain`.
pub fn allowed_categories(domain: ElementDomain) -> Vec<FailureCategory> {
    match domain {
        ElementDomain::Requirement => RequirementMode::ALL
            .iter()
            .map(|&m| FailureCategory::Requirement(m))
            .collect(),
        ElementDomain::Function => FunctionMode::ALL
            .iter()
            .map(|&m| FailureCategory::Function(m))
            .collect(),
        ElementDomain::Component => ComponentMode::ALL
            .iter()
            .map(|&m| FailureCategory::Component(m))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cause {
    pub text: String,
    pub occurrence_rank: Option<Rank>,
    pub frequency: Option<Frequency>,
}

impl Cause {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            occurrence_rank: None,
            frequency: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Effect {
    pub text: String,
    pub severity_class: Option<SeverityClass>,
    pub severity_rank: Option<Rank>,
}

impl Effect {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            severity_class: None,
            severity_rank: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlPlan {
    pub method_class: ControlMethod,
    pub method_text: Option<String>,
    pub detection_rank: Option<Rank>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureMode {
    pub id: ElementId,
    /// Owning requirement, function or component.
    pub element: ElementId,
    pub category: FailureCategory,
    pub description: String,
    pub effects: Vec<Effect>,
    pub causes: Vec<Cause>,
    pub control: Option<ControlPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub product: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DesignModel {
    pub meta: Meta,
    pub requirements: Vec<Requirement>,
    pub functions: Vec<Function>,
    pub components: Vec<Component>,
    /// Requirement → function edges.
    pub rf: Vec<MappingEdge>,
    /// Function → component edges.
    pub fc: Vec<MappingEdge>,
    pub failure_modes: Vec<FailureMode>,
}

impl DesignModel {
    /// The class containing `id`.
    pub fn element_domain(&self, id: &ElementId) -> Result<ElementDomain, ModelError> {
        if self.requirements.iter().any(|r| &r.id == id) {
            Ok(ElementDomain::Requirement)
        } else if self.functions.iter().any(|f| &f.id == id) {
            Ok(ElementDomain::Function)
        } else if self.components.iter().any(|c| &c.id == id) {
            Ok(ElementDomain::Component)
        } else {
            Err(ModelError::UnknownElement(id.clone()))
        }
    }

    /// Human-facing text of an element: requirement text, function phrase,
    /// or component name.
    pub fn element_text(&self, id: &ElementId) -> Option<String> {
        if let Some(r) = self.requirements.iter().find(|r| &r.id == id) {
            return Some(r.text.clone());
        }
        if let Some(f) = self.functions.iter().find(|f| &f.id == id) {
            return Some(f.phrase());
        }
        self.components
            .iter()
            .find(|c| &c.id == id)
            .map(|c| c.name.clone())
    }

    pub fn element_ids(&self, domain: ElementDomain) -> Vec<&ElementId> {
        match domain {
            ElementDomain::Requirement => self.requirements.iter().map(|r| &r.id).collect(),
            ElementDomain::Function => self.functions.iter().map(|f| &f.id).collect(),
            ElementDomain::Component => self.components.iter().map(|c| &c.id).collect(),
        }
    }

    pub fn failure_mode(&self, id: &ElementId) -> Option<&FailureMode> {
        self.failure_modes.iter().find(|fm| &fm.id == id)
    }

    pub fn failure_modes_of<'a>(
        &'a self,
        element: &'a ElementId,
    ) -> impl Iterator<Item = &'a FailureMode> + 'a {
        self.failure_modes
            .iter()
            .filter(move |fm| &fm.element == element)
    }

    /// Number of requirements, functions and components (m, n, p).
    pub fn dimensions(&self) -> (usize, usize, usize) {
        (
            self.requirements.len(),
            self.functions.len(),
            self.components.len(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> ElementId {
        ElementId::new(s).unwrap()
    }

    #[test]
    fn allowed_categories_match_taxonomies() {
        let names = |d| {
            allowed_categories(d)
                .into_iter()
                .map(FailureCategory::token)
                .collect::<Vec<_>>()
        };
        assert_eq!(
            names(ElementDomain::Requirement),
            [
                "Absence",
                "Incompleteness",
                "Intermittence",
                "Incorrectness",
                "ImproperOccurrence"
            ]
        );
        assert_eq!(
            names(ElementDomain::Function),
            [
                "Malfunction",
                "Interference",
                "Decayed",
                "Incompleteness",
                "Incorrectness"
            ]
        );
        assert_eq!(
            names(ElementDomain::Component),
            ["Damaged", "LossOfEfficiency", "EMI", "NonCompatible"]
        );
    }

    #[test]
    fn category_tokens_shared_across_domains() {
        assert_eq!(
            FailureCategory::domains_of("Incompleteness"),
            [ElementDomain::Requirement, ElementDomain::Function]
        );
        assert_eq!(
            FailureCategory::domains_of("Damaged"),
            [ElementDomain::Component]
        );
        assert!(FailureCategory::domains_of("Broken").is_empty());
    }

    #[test]
    fn element_id_token_rules() {
        assert!(ElementId::new("r_1-a").is_ok());
        assert!(ElementId::new("").is_err());
        assert!(ElementId::new("r 1").is_err());
        assert!(ElementId::new("ä").is_err());
    }

    #[test]
    fn rank_bounds() {
        assert!(Rank::new(0).is_err());
        assert!(Rank::new(11).is_err());
        assert_eq!(Rank::new(10).unwrap(), Rank::MAX);
        assert_eq!(Rank::all().count(), 10);
    }

    #[test]
    fn frequency_compares_exactly() {
        let a = Frequency::new(1, 1250).unwrap();
        let b = Frequency::new(8, 10000).unwrap();
        assert_eq!(a.cmp_value(b), Ordering::Equal);
        assert_ne!(a, b);
        assert!(Frequency::new(0, 3).is_err());
        assert!(Frequency::new(3, 0).is_err());
    }

    #[test]
    fn element_domain_lookup() {
        let model = DesignModel {
            requirements: vec![Requirement {
                id: id("r1"),
                text: "req".into(),
            }],
            components: vec![Component {
                id: id("c2"),
                name: "part".into(),
                concept: None,
            }],
            ..Default::default()
        };
        assert_eq!(
            model.element_domain(&id("r1")).unwrap(),
            ElementDomain::Requirement
        );
        assert_eq!(
            model.element_domain(&id("c2")).unwrap(),
            ElementDomain::Component
        );
        assert!(matches!(
            model.element_domain(&id("zz")),
            Err(ModelError::UnknownElement(_))
        ));
    }
}
