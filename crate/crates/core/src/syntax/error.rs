use alloc::string::String;

use super::lexer::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexErrorKind {
    BadToken,
    BadNumber,
    BadEscape,
    UnterminatedString,
    UnbalancedOpen,
    UnbalancedClose,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {}: `{token}`", self.describe())]
pub struct LexError {
    pub kind: LexErrorKind,
    pub span: Span,
    pub token: String,
}

impl LexError {
    fn describe(&self) -> &'static str {
        match self.kind {
            LexErrorKind::BadToken => "bad token",
            LexErrorKind::BadNumber => "bad numeric literal (decimal only)",
            LexErrorKind::BadEscape => "bad escape in string",
            LexErrorKind::UnterminatedString => "unterminated string",
            LexErrorKind::UnbalancedOpen => "unclosed parenthesis",
            LexErrorKind::UnbalancedClose => "unmatched closing parenthesis",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message} (at `{token}`)")]
pub struct ParseError {
    pub span: Span,
    pub token: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("lex error at {0}")]
    Lex(#[from] LexError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Lex(e) => e.span,
            SyntaxError::Parse(e) => e.span,
        }
    }

    /// The error text without its location.
    pub fn message(&self) -> String {
        match self {
            SyntaxError::Lex(e) => alloc::format!("{}: `{}`", e.describe(), e.token),
            SyntaxError::Parse(e) => alloc::format!("{} (at `{}`)", e.message, e.token),
        }
    }
}
