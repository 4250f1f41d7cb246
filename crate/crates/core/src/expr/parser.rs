//! Recursive-descent parser for component expressions.
//!
//! Precedence, loosest to tightest: `+ -`, `* /`, unary `-`, `^`
//! (right-associative). The right operand of `^` may itself carry a unary
//! minus, so `x1^-2` parses as `x1^(-2)`.

use super::{BinOp, Expr, Func, VarKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub message: String,
    /// Token classes that would have been accepted at `offset`.
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const OPERAND: &[&str] = &["number", "variable", "function", "'('", "'-'"];
const OPERATOR: &[&str] = &["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"];

fn lex(source: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    message: format!("malformed number '{text}'"),
                    expected: vec!["number"],
                })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(source[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character '{ch}'"),
                    expected: OPERAND.iter().chain(OPERATOR).copied().collect(),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, source.len()));
    Ok(out)
}

pub(super) struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    arity: usize,
    allowed: &'a [VarKind],
}

impl<'a> Parser<'a> {
    pub(super) fn new(source: &str, arity: usize, allowed: &'a [VarKind]) -> Result<Self, ParseError> {
        Ok(Self {
            tokens: lex(source)?,
            pos: 0,
            arity,
            allowed,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        let tok = self.peek();
        let message = if *tok == Tok::End {
            "unexpected end of input".to_string()
        } else {
            format!("unexpected {}", tok.describe())
        };
        ParseError {
            offset: self.offset(),
            message,
            expected: expected.to_vec(),
        }
    }

    pub(super) fn parse_complete(mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::End {
            return Err(ParseError {
                offset: 0,
                message: "empty expression".into(),
                expected: OPERAND.to_vec(),
            });
        }
        let e = self.additive()?;
        if *self.peek() != Tok::End {
            return Err(self.unexpected(OPERATOR));
        }
        Ok(e)
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.additive()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.bump();
                self.identifier(&name, at)
            }
            _ => Err(self.unexpected(OPERAND)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&["')'", "'+'", "'-'", "'*'", "'/'", "'^'"]))
        }
    }

    fn identifier(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        if let Some(func) = Func::from_name(name) {
            if *self.peek() != Tok::LParen {
                return Err(self.unexpected(&["'('"]));
            }
            self.bump();
            let arg = self.additive()?;
            self.expect_rparen()?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if name == "pi" {
            return Ok(Expr::Num(std::f64::consts::PI));
        }
        let (head, digits) = name.split_at(1);
        let kind = match head {
            "x" => Some(VarKind::Ambient),
            "u" => Some(VarKind::Param),
            _ => None,
        };
        match kind {
            Some(kind) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
                if !self.allowed.contains(&kind) {
                    return Err(ParseError {
                        offset: at,
                        message: format!(
                            "variable {name} not allowed here (expected {} variables)",
                            self.allowed
                                .iter()
                                .map(|k| k.prefix().to_string())
                                .collect::<Vec<_>>()
                                .join("/")
                        ),
                        expected: vec!["variable"],
                    });
                }
                let index: usize = digits.parse().map_err(|_| ParseError {
                    offset: at,
                    message: format!("variable index in {name} is out of range"),
                    expected: vec!["variable"],
                })?;
                if index == 0 {
                    return Err(ParseError {
                        offset: at,
                        message: format!("variable {name}: indices start at 1"),
                        expected: vec!["variable"],
                    });
                }
                if index > self.arity {
                    return Err(ParseError {
                        offset: at,
                        message: format!("variable {name} exceeds arity {}", self.arity),
                        expected: vec!["variable"],
                    });
                }
                Ok(Expr::Var(kind, index - 1))
            }
            _ => Err(ParseError {
                offset: at,
                message: format!("unknown identifier '{name}'"),
                expected: OPERAND.to_vec(),
            }),
        }
    }
}
