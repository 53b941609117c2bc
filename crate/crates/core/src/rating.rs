//! Evaluation schemes for occurrence, detection and severity, and the RPN
//! product.
//!
//! Every scheme maps onto the same five rank bands: `9-10`, `7-8`, `5-6`,
//! `2-4` and `1`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{token_enum, ElementDomain, Frequency, Rank};

/// An inclusive rank interval; only the five scheme bands are constructible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankBand {
    lo: Rank,
    hi: Rank,
}

const fn band(lo: u8, hi: u8) -> RankBand {
    RankBand {
        lo: Rank(lo),
        hi: Rank(hi),
    }
}

impl RankBand {
    pub const VERY_HIGH: RankBand = band(9, 10);
    pub const HIGH: RankBand = band(7, 8);
    pub const MODERATE: RankBand = band(5, 6);
    pub const LOW: RankBand = band(2, 4);
    pub const REMOTE: RankBand = band(1, 1);

    /// Bands from the top row of the schemes down.
    pub const ALL: [RankBand; 5] = [
        RankBand::VERY_HIGH,
        RankBand::HIGH,
        RankBand::MODERATE,
        RankBand::LOW,
        RankBand::REMOTE,
    ];

    pub fn lo(self) -> Rank {
        self.lo
    }

    pub fn hi(self) -> Rank {
        self.hi
    }

    pub fn contains(self, rank: Rank) -> bool {
        rank_consistent(rank, self)
    }

    /// The band for a scheme row, 0 being the top (`9-10`) row.
    fn row(index: usize) -> RankBand {
        RankBand::ALL[index]
    }
}

impl fmt::Display for RankBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

token_enum!(
    /// Severity classes for requirement effects, worst first.
    RequirementSeverity {
        SafetyIssue,
        /// Users switch to a competing product.
        ChooseCompetitor,
        /// The device has to go back for repair.
        ReturnToFix,
        /// Users put up with the problem.
        Tolerate,
        Invisible,
    }
);

token_enum!(
    /// Severity classes for function effects, worst first.
    FunctionSeverity {
        SafetyIssue,
        /// The function is hard to operate.
        DifficultToOperate,
        /// The function works below its performance standard.
        UnderStandardPerformance,
        /// A defect that leaves execution unaffected.
        IsolatedDefect,
        Invisible,
    }
);

token_enum!(
    /// Severity classes for component effects, worst first.
    ComponentSeverity {
        SafetyIssue,
        PrimaryFunctionEffect,
        SecondaryFunctionEffect,
        NonFunctionalEffect,
        Invisible,
    }
);

/// A severity class of one column of the severity scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeverityClass {
    Requirement(RequirementSeverity),
    Function(FunctionSeverity),
    Component(ComponentSeverity),
}

impl SeverityClass {
    pub fn domain(self) -> ElementDomain {
        match self {
            SeverityClass::Requirement(_) => ElementDomain::Requirement,
            SeverityClass::Function(_) => ElementDomain::Function,
            SeverityClass::Component(_) => ElementDomain::Component,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            SeverityClass::Requirement(c) => c.token(),
            SeverityClass::Function(c) => c.token(),
            SeverityClass::Component(c) => c.token(),
        }
    }

    pub fn parse(domain: ElementDomain, token: &str) -> Option<Self> {
        match domain {
            ElementDomain::Requirement => {
                RequirementSeverity::from_token(token).map(SeverityClass::Requirement)
            }
            ElementDomain::Function => {
                FunctionSeverity::from_token(token).map(SeverityClass::Function)
            }
            ElementDomain::Component => {
                ComponentSeverity::from_token(token).map(SeverityClass::Component)
            }
        }
    }

    /// Every class of `domain`, worst first.
    pub fn all(domain: ElementDomain) -> Vec<SeverityClass> {
        match domain {
            ElementDomain::Requirement => RequirementSeverity::ALL
                .iter()
                .map(|&c| SeverityClass::Requirement(c))
                .collect(),
            ElementDomain::Function => FunctionSeverity::ALL
                .iter()
                .map(|&c| SeverityClass::Function(c))
                .collect(),
            ElementDomain::Component => ComponentSeverity::ALL
                .iter()
                .map(|&c| SeverityClass::Component(c))
                .collect(),
        }
    }

    /// Row position within its column, 0 = `SafetyIssue`.
    fn row(self) -> usize {
        match self {
            SeverityClass::Requirement(c) => c as usize,
            SeverityClass::Function(c) => c as usize,
            SeverityClass::Component(c) => c as usize,
        }
    }
}

impl fmt::Display for SeverityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

token_enum!(
    /// How the failure cause is controlled, from least to most effective.
    ControlMethod {
        NoApparentMethod,
        DesignAnalysis,
        StandardDesignDocuments,
        PassFailOrReliabilityTest,
        /// Function-simulated testing of the real product.
        RealLifeProductTest,
    }
);

impl Serialize for ControlMethod {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for ControlMethod {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        ControlMethod::from_token(&token).ok_or_else(|| {
            serde::de::Error::custom(format!(
                "unknown control method class {token:?}, expected one of {}",
                ControlMethod::ALL
                    .iter()
                    .map(|m| m.token())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })
    }
}

/// Band of an observed failure frequency.
///
/// Frequencies falling between two rows of the occurrence scheme go to the
/// higher adjacent band.
pub fn occurrence_band(frequency: Frequency) -> RankBand {
    let at_least =
        |n| frequency.cmp_value(Frequency::one_in(n).expect("nonzero")) != Ordering::Less;
    let above =
        |n| frequency.cmp_value(Frequency::one_in(n).expect("nonzero")) == Ordering::Greater;
    if at_least(20) {
        RankBand::VERY_HIGH
    } else if at_least(125) {
        RankBand::HIGH
    } else if above(10_000) {
        RankBand::MODERATE
    } else if above(1_000_000) {
        RankBand::LOW
    } else {
        RankBand::REMOTE
    }
}

pub fn severity_band(class: SeverityClass) -> RankBand {
    RankBand::row(class.row())
}

pub fn detection_band(method: ControlMethod) -> RankBand {
    RankBand::row(method as usize)
}

pub fn rank_consistent(rank: Rank, band: RankBand) -> bool {
    band.lo <= rank && rank <= band.hi
}

/// Rank used when only a class or frequency is known: the band maximum.
pub fn representative_rank(band: RankBand) -> Rank {
    band.hi
}

/// Risk priority number `S × O × D`, in 1..=1000.
pub fn rpn(severity: Rank, occurrence: Rank, detection: Rank) -> u16 {
    u16::from(severity.value()) * u16::from(occurrence.value()) * u16::from(detection.value())
}
