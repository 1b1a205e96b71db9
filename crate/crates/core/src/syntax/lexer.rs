//! Tokenizer and s-expression reader.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::error::{LexError, LexErrorKind};

/// A 1-based line/column position in the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub const fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    LParen,
    RParen,
    /// Identifiers and `:`-keywords.
    Symbol(String),
    Number(f64),
    Str(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.col)
    }
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"'
}

/// Decimal literal: optional sign, digits, optional `.digits`.
fn parse_decimal(text: &str) -> Option<f64> {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let ok = match frac {
        None => digits(int),
        Some(f) => (digits(int) && (f.is_empty() || digits(f))) || (int.is_empty() && digits(f)),
    };
    if !ok {
        return None;
    }
    text.parse::<f64>().ok()
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor { chars: source.chars().peekable(), line: 1, col: 1 };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let span = cur.span();
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            ';' => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            }
            '(' => {
                cur.bump();
                tokens.push(Token { kind: TokenKind::LParen, span });
            }
            ')' => {
                cur.bump();
                tokens.push(Token { kind: TokenKind::RParen, span });
            }
            '"' => {
                cur.bump();
                let mut text = String::new();
                loop {
                    match cur.bump() {
                        None => {
                            return Err(LexError { kind: LexErrorKind::UnterminatedString, span, token: text });
                        }
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some(e @ ('"' | '\\')) => text.push(e),
                            Some('n') => text.push('\n'),
                            other => {
                                let mut token = String::from("\\");
                                token.extend(other);
                                return Err(LexError { kind: LexErrorKind::BadEscape, span, token });
                            }
                        },
                        Some(c) => text.push(c),
                    }
                }
                tokens.push(Token { kind: TokenKind::Str(text), span });
            }
            _ => {
                let mut text = String::new();
                while let Some(c) = cur.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    text.push(c);
                    cur.bump();
                }
                let first = text.chars().next().unwrap_or(' ');
                let second = text.chars().nth(1);
                let numeric = first.is_ascii_digit()
                    || first == '.'
                    || ((first == '-' || first == '+') && second.is_some_and(|c| c.is_ascii_digit() || c == '.'));
                let kind = if numeric {
                    match parse_decimal(&text) {
                        Some(v) => TokenKind::Number(v),
                        None => return Err(LexError { kind: LexErrorKind::BadNumber, span, token: text }),
                    }
                } else if text.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.' | '?')) {
                    TokenKind::Symbol(text)
                } else {
                    return Err(LexError { kind: LexErrorKind::BadToken, span, token: text });
                };
                tokens.push(Token { kind, span });
            }
        }
    }
    Ok(tokens)
}

/// A node of the generic s-expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Symbol(String, Span),
    Number(f64, Span),
    Str(String, Span),
    List(Vec<Sexp>, Span),
}

impl Sexp {
    pub fn span(&self) -> Span {
        match self {
            Sexp::Symbol(_, s) | Sexp::Number(_, s) | Sexp::Str(_, s) | Sexp::List(_, s) => *s,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// Short rendering of the node used in error messages.
    pub fn describe(&self) -> String {
        use alloc::format;
        match self {
            Sexp::Symbol(s, _) => s.clone(),
            Sexp::Number(n, _) => format!("{n}"),
            Sexp::Str(s, _) => format!("{s:?}"),
            Sexp::List(items, _) => match items.first() {
                Some(Sexp::Symbol(head, _)) => format!("({head} ...)"),
                Some(_) => String::from("(...)"),
                None => String::from("()"),
            },
        }
    }
}

/// Reads every top-level form in `source`.
pub fn read_all(source: &str) -> Result<Vec<Sexp>, LexError> {
    let tokens = tokenize(source)?;
    let mut stack: Vec<(Vec<Sexp>, Span)> = Vec::new();
    let mut top = Vec::new();
    for tok in tokens {
        let node = match tok.kind {
            TokenKind::LParen => {
                stack.push((Vec::new(), tok.span));
                continue;
            }
            TokenKind::RParen => match stack.pop() {
                Some((items, span)) => Sexp::List(items, span),
                None => {
                    return Err(LexError {
                        kind: LexErrorKind::UnbalancedClose,
                        span: tok.span,
                        token: String::from(")"),
                    })
                }
            },
            TokenKind::Symbol(s) => Sexp::Symbol(s, tok.span),
            TokenKind::Number(n) => Sexp::Number(n, tok.span),
            TokenKind::Str(s) => Sexp::Str(s, tok.span),
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(node),
            None => top.push(node),
        }
    }
    if let Some((_, span)) = stack.pop() {
        return Err(LexError { kind: LexErrorKind::UnbalancedOpen, span, token: String::from("(") });
    }
    Ok(top)
}
