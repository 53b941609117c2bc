//! Requirement/function/component FMEA: a design model, rating tables,
//! severity and occurrence propagation across the mapping matrices, and
//! worksheet generation.

pub mod analysis;
pub mod diff;
pub mod error;
pub mod fixtures;
mod index;
pub mod io;
pub mod model;
pub mod rating;
pub mod reports;
pub mod trace;
pub mod validate;

pub use analysis::{analyze, analyze_with, AnalysisOptions, AnalysisResult, RpnRow};
pub use error::{AnalysisError, ModelError, ProcedureError};
pub use io::{parse_model, serialize_model, ParseError};
pub use model::{DesignModel, ElementDomain, ElementId, FailureMode, Frequency, Rank};
pub use reports::{run_procedure, run_procedure_with, ArtifactBundle, Format};
pub use validate::{validate_model, Finding, Strictness, ValidationReport};
