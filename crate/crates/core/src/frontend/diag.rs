use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Span { line, col }
    }

    pub fn is_valid(&self) -> bool {
        self.line >= 1 && self.col >= 1
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Parse,
    Unsupported,
    UnknownSymbol,
    Sort,
    WidthMix,
    Reserved,
    TransNotEquational,
    PrimedOutsideTrans,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Parse => "E_PARSE",
            ErrorCode::Unsupported => "E_UNSUPPORTED",
            ErrorCode::UnknownSymbol => "E_UNKNOWN_SYMBOL",
            ErrorCode::Sort => "E_SORT",
            ErrorCode::WidthMix => "E_WIDTH_MIX",
            ErrorCode::Reserved => "E_RESERVED",
            ErrorCode::TransNotEquational => "E_TRANS_NOT_EQUATIONAL",
            ErrorCode::PrimedOutsideTrans => "E_PRIMED_OUTSIDE_TRANS",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: ErrorCode,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: ErrorCode, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity.as_str(),
            self.code,
            self.span,
            self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

pub type PResult<T> = Result<T, Diagnostic>;
