use std::fmt;

use serde::Serialize;

/// Why a file or an inline test was rejected at collection time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReasonCode {
    ReadError,
    DecodeError,
    SyntaxError,
    NoTarget,
    UnknownMethod,
    NoCheck,
    BadArity,
    BadConstructorArg,
    GivenAfterCheck,
    NonIdentifierGivenTarget,
    DuplicateGiven,
    NotAStatement,
    ParamLengthMismatch,
    ParamNotList,
    UnresolvedName,
    ImportError,
    /// Informational: the file was skipped because `--ignore-import-errors`
    /// was given. Does not affect the exit code.
    ImportSkipped,
}

impl ReasonCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasonCode::ReadError => "READ_ERROR",
            ReasonCode::DecodeError => "DECODE_ERROR",
            ReasonCode::SyntaxError => "SYNTAX_ERROR",
            ReasonCode::NoTarget => "NO_TARGET",
            ReasonCode::UnknownMethod => "UNKNOWN_METHOD",
            ReasonCode::NoCheck => "NO_CHECK",
            ReasonCode::BadArity => "BAD_ARITY",
            ReasonCode::BadConstructorArg => "BAD_CONSTRUCTOR_ARG",
            ReasonCode::GivenAfterCheck => "GIVEN_AFTER_CHECK",
            ReasonCode::NonIdentifierGivenTarget => "NON_IDENTIFIER_GIVEN_TARGET",
            ReasonCode::DuplicateGiven => "DUPLICATE_GIVEN",
            ReasonCode::NotAStatement => "NOT_A_STATEMENT",
            ReasonCode::ParamLengthMismatch => "PARAM_LENGTH_MISMATCH",
            ReasonCode::ParamNotList => "PARAM_NOT_LIST",
            ReasonCode::UnresolvedName => "UNRESOLVED_NAME",
            ReasonCode::ImportError => "IMPORT_ERROR",
            ReasonCode::ImportSkipped => "IMPORT_SKIPPED",
        }
    }

    /// Whether an entry with this code makes the run fail.
    pub fn is_fatal(self) -> bool {
        !matches!(self, ReasonCode::ImportSkipped)
    }

    /// Codes produced by misuse of the inline-test API.
    pub fn is_malformed(self) -> bool {
        matches!(
            self,
            ReasonCode::UnknownMethod
                | ReasonCode::NoCheck
                | ReasonCode::BadArity
                | ReasonCode::BadConstructorArg
                | ReasonCode::GivenAfterCheck
                | ReasonCode::NonIdentifierGivenTarget
                | ReasonCode::DuplicateGiven
                | ReasonCode::NotAStatement
                | ReasonCode::ParamLengthMismatch
                | ReasonCode::ParamNotList
        )
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rejected file or inline test. Never executed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectionError {
    pub path: String,
    pub line: Option<usize>,
    pub reason: ReasonCode,
    pub message: String,
}

impl CollectionError {
    pub fn new(
        path: impl Into<String>,
        line: Option<usize>,
        reason: ReasonCode,
        message: impl Into<String>,
    ) -> Self {
        CollectionError {
            path: path.into(),
            line,
            reason,
            message: message.into(),
        }
    }

    pub fn location(&self) -> String {
        match self.line {
            Some(line) => format!("{}:{}", self.path, line),
            None => self.path.clone(),
        }
    }
}

impl fmt::Display for CollectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.location(), self.reason, self.message)
    }
}

impl std::error::Error for CollectionError {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectionWarning {
    pub path: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for CollectionWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: warning: {}", self.path, self.line, self.message)
    }
}
