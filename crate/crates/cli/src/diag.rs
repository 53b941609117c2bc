//! Human-readable diagnostics on stderr, optionally colored.

use std::env;
use std::io::{self, IsTerminal, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Error,
    Warning,
    Note,
}

impl Level {
    fn label(self) -> &'static str {
        match self {
            Level::Error => "error",
            Level::Warning => "warning",
            Level::Note => "note",
        }
    }

    fn ansi(self) -> &'static str {
        match self {
            Level::Error => "\x1b[1;31m",
            Level::Warning => "\x1b[1;33m",
            Level::Note => "\x1b[1;36m",
        }
    }
}

/// `RISKFORGE_COLOR=always|never|auto`; anything else behaves as `auto`.
pub fn color_enabled() -> bool {
    match env::var("RISKFORGE_COLOR").as_deref() {
        Ok("always") => true,
        Ok("never") => false,
        _ => io::stderr().is_terminal() && env::var_os("NO_COLOR").is_none(),
    }
}

pub struct Diagnostics {
    color: bool,
    pub errors: usize,
    pub warnings: usize,
}

impl Diagnostics {
    pub fn new() -> Self {
        Diagnostics {
            color: color_enabled(),
            errors: 0,
            warnings: 0,
        }
    }

    pub fn emit(&mut self, level: Level, location: Option<&str>, message: &str) {
        match level {
            Level::Error => self.errors += 1,
            Level::Warning => self.warnings += 1,
            Level::Note => {}
        }
        let label = if self.color {
            format!("{}{}\x1b[0m", level.ansi(), level.label())
        } else {
            level.label().to_string()
        };
        let line = match location {
            Some(loc) => format!("{loc}: {label}: {message}"),
            None => format!("{label}: {message}"),
        };
        let _ = writeln!(io::stderr().lock(), "{line}");
    }

    pub fn error(&mut self, location: Option<&str>, message: &str) {
        self.emit(Level::Error, location, message);
    }

    pub fn warning(&mut self, location: Option<&str>, message: &str) {
        self.emit(Level::Warning, location, message);
    }

    pub fn note(&mut self, message: &str) {
        self.emit(Level::Note, None, message);
    }
}
