//! Positioned diagnostics shared by the parser and the linter.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic codes. `E0xx` come from parsing, `E1xx`/`W2xx` from lint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Code {
    /// Syntax error.
    E001,
    /// Duplicate name.
    E002,
    /// Unterminated string.
    E010,
    /// Illegal character or escape.
    E011,
    /// Missing `start` section.
    E100,
    /// `goto` to an undefined section.
    E101,
    /// Reference to an undefined parameter.
    E102,
    /// Type mismatch.
    E103,
    /// Category literal not among the declared values.
    E104,
    /// Unreachable section.
    W200,
    /// Parameter never referenced.
    W201,
    /// Section with no rules.
    W202,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E010 => "E010",
            Code::E011 => "E011",
            Code::E100 => "E100",
            Code::E101 => "E101",
            Code::E102 => "E102",
            Code::E103 => "E103",
            Code::E104 => "E104",
            Code::W200 => "W200",
            Code::W201 => "W201",
            Code::W202 => "W202",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::W200 | Code::W201 | Code::W202 => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            message: message.into(),
            span,
        }
    }

    pub fn error(code: Code, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: CODE message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{file}:{}:{}: {} {}",
            self.span.line, self.span.column, self.code, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {}", self.span, self.code, self.message)
    }
}
