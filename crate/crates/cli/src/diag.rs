use std::fmt;

/// A one-based source position. Positions never take part in equality, so
/// a reparsed pretty-print compares equal to the original.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl Span {
    pub fn new(line: usize, column: usize) -> Span {
        Span { line, column }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

/// An input error with its position and, for syntax errors, the tokens
/// that would have been accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { span, message: message.into(), expected: Vec::new() }
    }

    pub fn expecting(span: Span, message: impl Into<String>, expected: &[&str]) -> Diagnostic {
        let mut expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        expected.sort();
        expected.dedup();
        Diagnostic { span, message: message.into(), expected }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "line": self.span.line,
            "column": self.span.column,
            "message": self.message,
            "expected": self.expected,
        })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}
