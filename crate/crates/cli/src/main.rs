//! riskforge: validate design models, propagate S/O/D ratings and write
//! FMEA worksheets.

mod diag;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use riskforge::analysis::analyze_with;
use riskforge::diff::{diff_csv, diff_results};
use riskforge::io::pointer_position;
use riskforge::rating::{
    detection_band, occurrence_band, representative_rank, severity_band, ControlMethod, RankBand,
    SeverityClass,
};
use riskforge::trace::{trace, Direction};
use riskforge::validate::{FindingCode, FindingSeverity};
use riskforge::{
    parse_model, run_procedure_with, validate_model, AnalysisOptions, DesignModel, ElementDomain,
    ElementId, Finding, Format, Frequency, ProcedureError, Strictness,
};

use crate::diag::Diagnostics;

const EXIT_OK: u8 = 0;
const EXIT_FINDINGS: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "riskforge",
    version,
    about = "Requirement/function/component FMEA"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and report errors and warnings
    Validate {
        model: PathBuf,
        /// Exit 1 when there are warnings
        #[arg(long)]
        strict: bool,
    },
    /// Run the full procedure and emit priority reports and FMEA worksheets
    Analyze {
        model: PathBuf,
        /// Write the five artifacts into DIR instead of stdout
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Leave detection unset on requirement and function rows
        #[arg(long)]
        no_detection_propagation: bool,
        /// Exit 1 when there are warnings
        #[arg(long)]
        strict: bool,
    },
    /// List the effects or causes reachable from a failure mode
    Trace {
        model: PathBuf,
        #[arg(long, value_name = "ID")]
        fm: String,
        #[arg(long, value_enum)]
        direction: DirectionArg,
    },
    /// Look up rating bands
    Rank {
        #[command(subcommand)]
        table: RankTable,
    },
    /// Tabulate RPN changes and priority moves between two models
    Diff { old: PathBuf, new: PathBuf },
}

#[derive(Subcommand)]
enum RankTable {
    /// Occurrence band for a frequency written as NUM/DEN
    Occurrence { frequency: String },
    /// Severity band for a domain's severity class
    Severity { domain: String, class: String },
    /// Detection band for a control method class
    Detection { class: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Md,
    Json,
}

impl From<FormatArg> for Format {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Csv => Format::Csv,
            FormatArg::Md => Format::Markdown,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Effects,
    Causes,
}

impl From<DirectionArg> for Direction {
    fn from(arg: DirectionArg) -> Self {
        match arg {
            DirectionArg::Effects => Direction::Effects,
            DirectionArg::Causes => Direction::Causes,
        }
    }
}

/// A model file read and parsed, kept with its text so findings can be
/// given line and column positions.
struct Loaded {
    path: PathBuf,
    text: String,
    model: DesignModel,
}

impl Loaded {
    fn location(&self, finding: &Finding) -> String {
        if finding.pointer.is_empty() {
            return self.path.display().to_string();
        }
        let (line, column) = pointer_position(&self.text, &finding.pointer);
        format!("{}:{line}:{column}", self.path.display())
    }

    fn report(&self, diag: &mut Diagnostics, finding: &Finding) {
        let message = format!("[{}] {}: {}", finding.code, finding.path, finding.message);
        let location = self.location(finding);
        match finding.severity {
            FindingSeverity::Error => diag.error(Some(&location), &message),
            FindingSeverity::Warning => diag.warning(Some(&location), &message),
        }
    }
}

/// Reads and parses a model. Structural problems exit 1; unreadable files,
/// malformed JSON and schema violations exit 2.
fn load(path: &Path, diag: &mut Diagnostics) -> Result<Loaded, u8> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(err) => {
            diag.error(
                Some(&path.display().to_string()),
                &format!("cannot read: {err}"),
            );
            return Err(EXIT_USAGE);
        }
    };
    match parse_model(&text) {
        Ok(model) => Ok(Loaded {
            path: path.to_path_buf(),
            text,
            model,
        }),
        Err(errors) => {
            let mut structural_only = true;
            for err in &errors {
                structural_only &= FindingCode::from_token(&err.code).is_some();
                diag.error(
                    Some(&format!("{}:{}:{}", path.display(), err.line, err.column)),
                    &format!("[{}] {}", err.code, err.message),
                );
            }
            Err(if structural_only {
                EXIT_FINDINGS
            } else {
                EXIT_USAGE
            })
        }
    }
}

fn finish(diag: &Diagnostics, strict: bool) -> u8 {
    if diag.errors > 0 || (strict && diag.warnings > 0) {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

fn cmd_validate(path: &Path, strict: bool) -> u8 {
    let mut diag = Diagnostics::new();
    let loaded = match load(path, &mut diag) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let report = validate_model(&loaded.model, Strictness::AnalysisReady);
    for finding in &report.findings {
        loaded.report(&mut diag, finding);
    }
    diag.note(&format!(
        "{}: {} error(s), {} warning(s)",
        path.display(),
        report.error_count(),
        report.warning_count()
    ));
    finish(&diag, strict)
}

fn cmd_analyze(
    path: &Path,
    out: Option<&Path>,
    format: Format,
    options: AnalysisOptions,
    strict: bool,
) -> u8 {
    let mut diag = Diagnostics::new();
    let loaded = match load(path, &mut diag) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let bundle = match run_procedure_with(&loaded.model, options) {
        Ok(bundle) => bundle,
        Err(ProcedureError::ValidationFailed(report)) => {
            for finding in &report.findings {
                loaded.report(&mut diag, finding);
            }
            return EXIT_FINDINGS;
        }
        Err(err) => {
            diag.error(Some(&path.display().to_string()), &err.to_string());
            return EXIT_FINDINGS;
        }
    };
    for finding in bundle
        .validation
        .warnings()
        .chain(&bundle.requirement_priority.warnings)
        .chain(&bundle.function_priority.warnings)
    {
        loaded.report(&mut diag, finding);
    }

    match out {
        Some(dir) => match bundle.write_to(dir, format) {
            Ok(paths) => {
                for written in paths {
                    diag.note(&format!("wrote {}", written.display()));
                }
            }
            Err(err) => {
                diag.error(
                    Some(&dir.display().to_string()),
                    &format!("cannot write: {err}"),
                );
                return EXIT_USAGE;
            }
        },
        None => {
            let mut stdout = io::stdout().lock();
            for (i, (name, contents)) in bundle.artifacts(format).into_iter().enumerate() {
                let sep = if i == 0 { "" } else { "\n" };
                if write!(stdout, "{sep}==> {name} <==\n{contents}").is_err() {
                    return EXIT_USAGE;
                }
            }
        }
    }
    finish(&diag, strict)
}

fn cmd_trace(path: &Path, fm: &str, direction: Direction) -> u8 {
    let mut diag = Diagnostics::new();
    let loaded = match load(path, &mut diag) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let Ok(id) = ElementId::new(fm) else {
        diag.error(None, &format!("invalid failure mode id {fm:?}"));
        return EXIT_USAGE;
    };
    match trace(&loaded.model, &id, direction) {
        Ok(chain) => {
            print!("{chain}");
            EXIT_OK
        }
        Err(err) => {
            diag.error(Some(&path.display().to_string()), &err.to_string());
            EXIT_FINDINGS
        }
    }
}

fn print_band(band: RankBand) -> u8 {
    println!("band: {band}");
    println!("representative: {}", representative_rank(band));
    EXIT_OK
}

fn parse_frequency(text: &str) -> Option<Frequency> {
    let (num, den) = text.split_once('/')?;
    Frequency::new(num.trim().parse().ok()?, den.trim().parse().ok()?).ok()
}

fn cmd_rank(table: &RankTable) -> u8 {
    let mut diag = Diagnostics::new();
    match table {
        RankTable::Occurrence { frequency } => {
            match parse_frequency(frequency) {
                Some(f) => print_band(occurrence_band(f)),
                None => {
                    diag.error(
                    None,
                    &format!("expected a frequency NUM/DEN with positive integers, got {frequency:?}"),
                );
                    EXIT_USAGE
                }
            }
        }
        RankTable::Severity { domain, class } => {
            let Some(d) = ElementDomain::parse(domain) else {
                diag.error(
                    None,
                    &format!(
                        "unknown domain {domain:?}; expected requirement, function or component"
                    ),
                );
                return EXIT_USAGE;
            };
            match SeverityClass::parse(d, class) {
                Some(c) => print_band(severity_band(c)),
                None => {
                    let known: Vec<_> = SeverityClass::all(d).iter().map(|c| c.token()).collect();
                    diag.error(
                        None,
                        &format!(
                            "unknown {d} severity class {class:?}; expected one of {}",
                            known.join(", ")
                        ),
                    );
                    EXIT_USAGE
                }
            }
        }
        RankTable::Detection { class } => match ControlMethod::from_token(class) {
            Some(m) => print_band(detection_band(m)),
            None => {
                let known: Vec<_> = ControlMethod::ALL.iter().map(|m| m.token()).collect();
                diag.error(
                    None,
                    &format!(
                        "unknown control method {class:?}; expected one of {}",
                        known.join(", ")
                    ),
                );
                EXIT_USAGE
            }
        },
    }
}

fn cmd_diff(old: &Path, new: &Path) -> u8 {
    let mut diag = Diagnostics::new();
    let mut results = Vec::new();
    for path in [old, new] {
        let loaded = match load(path, &mut diag) {
            Ok(loaded) => loaded,
            Err(code) => return code,
        };
        let report = validate_model(&loaded.model, Strictness::AnalysisReady);
        if report.has_errors() {
            for finding in report.errors() {
                loaded.report(&mut diag, finding);
            }
            return EXIT_FINDINGS;
        }
        match analyze_with(&loaded.model, AnalysisOptions::default()) {
            Ok(result) => results.push(result),
            Err(err) => {
                diag.error(Some(&path.display().to_string()), &err.to_string());
                return EXIT_FINDINGS;
            }
        }
    }
    print!("{}", diff_csv(&diff_results(&results[0], &results[1])));
    EXIT_OK
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Validate { model, strict } => cmd_validate(model, *strict),
        Command::Analyze {
            model,
            out,
            format,
            no_detection_propagation,
            strict,
        } => cmd_analyze(
            model,
            out.as_deref(),
            (*format).into(),
            AnalysisOptions {
                propagate_detection: !no_detection_propagation,
            },
            *strict,
        ),
        Command::Trace {
            model,
            fm,
            direction,
        } => cmd_trace(model, fm, (*direction).into()),
        Command::Rank { table } => cmd_rank(table),
        Command::Diff { old, new } => cmd_diff(old, new),
    };
    ExitCode::from(code)
}
