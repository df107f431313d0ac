//! Structured error reports.

use std::fmt;

/// A byte range in a source file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn merge(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// One-based line and column (in characters) of the start of the span.
    pub fn line_col(&self, source: &str) -> (usize, usize) {
        let start = self.start.min(source.len());
        let before = &source[..start];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let col = before[line_start..].chars().count() + 1;
        (line, col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Code {
    Syntax,
    Duplicate,
    Scope,
    Conv,
    NotFun,
    NotPair,
    NotPath,
    NotType,
    Infer,
    Universe,
    IsoPremise,
    Internal,
    OracleIso,
    OracleBound,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "E-SYNTAX",
            Code::Duplicate => "E-DUP",
            Code::Scope => "E-SCOPE",
            Code::Conv => "E-CONV",
            Code::NotFun => "E-NOTFUN",
            Code::NotPair => "E-NOTPAIR",
            Code::NotPath => "E-NOTPATH",
            Code::NotType => "E-NOTTYPE",
            Code::Infer => "E-INFER",
            Code::Universe => "E-UNIVERSE",
            Code::IsoPremise => "E-ISO-PREMISE",
            Code::Internal => "E-INTERNAL",
            Code::OracleIso => "E-ORACLE-ISO",
            Code::OracleBound => "E-ORACLE-BOUND",
        }
    }

    pub fn parse(s: &str) -> Option<Code> {
        use Code::*;
        [
            Syntax,
            Duplicate,
            Scope,
            Conv,
            NotFun,
            NotPair,
            NotPath,
            NotType,
            Infer,
            Universe,
            IsoPremise,
            Internal,
            OracleIso,
            OracleBound,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("error[{code}]: {message}")]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Option<Span>,
    /// Normal forms, rendered in surface syntax.
    pub expected: Option<String>,
    pub actual: Option<String>,
    /// The underlying failure, for wrapped premises.
    pub cause: Option<Box<Diagnostic>>,
}

impl Diagnostic {
    pub fn error(code: Code, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span: None,
            expected: None,
            actual: None,
            cause: None,
        }
    }

    pub fn with_span(mut self, span: Span) -> Diagnostic {
        self.span = Some(span);
        self
    }

    /// Attach a span unless a more precise one is already present.
    pub fn or_span(mut self, span: Span) -> Diagnostic {
        self.span.get_or_insert(span);
        self
    }

    pub fn with_expected(mut self, expected: impl Into<String>) -> Diagnostic {
        self.expected = Some(expected.into());
        self
    }

    pub fn with_actual(mut self, actual: impl Into<String>) -> Diagnostic {
        self.actual = Some(actual.into());
        self
    }

    /// Wrap `cause` under a new code, keeping its span and normal forms.
    pub fn wrap(code: Code, message: impl Into<String>, cause: Diagnostic) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: format!("{}: {}", message.into(), cause.message),
            span: cause.span,
            expected: cause.expected.clone(),
            actual: cause.actual.clone(),
            cause: Some(Box::new(cause)),
        }
    }

    /// `FILE:LINE:COL: error[CODE]: MESSAGE`, then optional `expected:` and
    /// `actual:` lines.
    pub fn render(&self, file: &str, source: &str) -> String {
        let (line, col) = self.span.map_or((1, 1), |s| s.line_col(source));
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut out = format!(
            "{file}:{line}:{col}: {severity}[{}]: {}",
            self.code, self.message
        );
        if let Some(expected) = &self.expected {
            out.push_str(&format!("\nexpected: {expected}"));
        }
        if let Some(actual) = &self.actual {
            out.push_str(&format!("\nactual: {actual}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column() {
        let src = "def a : I => left\ndef b : I => @";
        let at = src.find('@').unwrap();
        assert_eq!(Span::new(at, at + 1).line_col(src), (2, 14));
    }

    #[test]
    fn render_format() {
        let d = Diagnostic::error(Code::Conv, "type mismatch")
            .with_span(Span::new(0, 3))
            .with_expected("Bool")
            .with_actual("I");
        assert_eq!(
            d.render("f.hti", "def x"),
            "f.hti:1:1: error[E-CONV]: type mismatch\nexpected: Bool\nactual: I"
        );
    }

    #[test]
    fn codes_round_trip() {
        assert_eq!(Code::parse("E-ISO-PREMISE"), Some(Code::IsoPremise));
        assert_eq!(Code::parse("E-NOPE"), None);
    }
}
