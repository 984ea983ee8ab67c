//! Text parser for expressions.
//!
//! Grammar (standard precedence, `^` right-associative and binding
//! tighter than unary minus):
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := '-' factor | postfix
//! postfix := atom ('^' factor)?
//! atom    := NUMBER | IDENT | ('exp'|'log') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numeric literals are read exactly: decimals become rationals over a
//! power of ten, and an optional exponent suffix (`1.5e-3`) scales by an
//! exact power of ten. The identifier `i` is the imaginary unit; every
//! other identifier must be declared in the [`SymbolTable`]. The returned
//! expression is normalized.

use super::{normalize, Expr, ExprRef, SymbolTable, Q};
use num::BigInt;
use thiserror::Error;

/// Parse failure with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at byte {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("unexpected {found} at byte {pos}, expected {expected}")]
    UnexpectedToken { pos: usize, found: String, expected: &'static str },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("unknown symbol {name:?} at byte {pos}; declare it as a variable or parameter")]
    UnknownSymbol { pos: usize, name: String },
    #[error("{name:?} at byte {pos} is not a function")]
    NotAFunction { pos: usize, name: String },
    #[error("invalid numeric literal {text:?} at byte {pos}")]
    InvalidNumber { pos: usize, text: String },
}

/// Parses `input` against the declared symbols and returns the normalized
/// expression.
pub fn parse(input: &str, symbols: &SymbolTable) -> Result<ExprRef, ParseError> {
    let tokens = tokenize(input)?;
    let mut parser = Parser { tokens, at: 0, symbols };
    let e = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError::UnexpectedToken {
            pos: tok.pos,
            found: tok.kind.describe(),
            expected: "end of input",
        });
    }
    Ok(normalize(&e))
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(Q),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Num(_) => "number".to_owned(),
            TokenKind::Ident(name) => format!("identifier {name:?}"),
            TokenKind::Plus => "'+'".to_owned(),
            TokenKind::Minus => "'-'".to_owned(),
            TokenKind::Star => "'*'".to_owned(),
            TokenKind::Slash => "'/'".to_owned(),
            TokenKind::Caret => "'^'".to_owned(),
            TokenKind::LParen => "'('".to_owned(),
            TokenKind::RParen => "')'".to_owned(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut at = 0;
    while at < bytes.len() {
        let c = bytes[at] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => at += 1,
            '+' => {
                tokens.push(Token { kind: TokenKind::Plus, pos: at });
                at += 1;
            }
            '-' => {
                tokens.push(Token { kind: TokenKind::Minus, pos: at });
                at += 1;
            }
            '*' => {
                tokens.push(Token { kind: TokenKind::Star, pos: at });
                at += 1;
            }
            '/' => {
                tokens.push(Token { kind: TokenKind::Slash, pos: at });
                at += 1;
            }
            '^' => {
                tokens.push(Token { kind: TokenKind::Caret, pos: at });
                at += 1;
            }
            '(' => {
                tokens.push(Token { kind: TokenKind::LParen, pos: at });
                at += 1;
            }
            ')' => {
                tokens.push(Token { kind: TokenKind::RParen, pos: at });
                at += 1;
            }
            '0'..='9' | '.' => {
                let start = at;
                while at < bytes.len() && bytes[at].is_ascii_digit() {
                    at += 1;
                }
                if at < bytes.len() && bytes[at] == b'.' {
                    at += 1;
                    while at < bytes.len() && bytes[at].is_ascii_digit() {
                        at += 1;
                    }
                }
                // Exponent suffix only when digits follow, so `2e` in a
                // future identifier position is not swallowed.
                if at < bytes.len() && (bytes[at] == b'e' || bytes[at] == b'E') {
                    let mut probe = at + 1;
                    if probe < bytes.len() && (bytes[probe] == b'+' || bytes[probe] == b'-') {
                        probe += 1;
                    }
                    if probe < bytes.len() && bytes[probe].is_ascii_digit() {
                        at = probe;
                        while at < bytes.len() && bytes[at].is_ascii_digit() {
                            at += 1;
                        }
                    }
                }
                let text = &input[start..at];
                let value = number_literal(text).ok_or_else(|| ParseError::InvalidNumber {
                    pos: start,
                    text: text.to_owned(),
                })?;
                tokens.push(Token { kind: TokenKind::Num(value), pos: start });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = at;
                while at < bytes.len()
                    && (bytes[at].is_ascii_alphanumeric() || bytes[at] == b'_')
                {
                    at += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(input[start..at].to_owned()),
                    pos: start,
                });
            }
            other => return Err(ParseError::UnexpectedChar { pos: at, found: other }),
        }
    }
    Ok(tokens)
}

/// Exact rational value of a decimal literal with optional `e` exponent.
fn number_literal(text: &str) -> Option<Q> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(split) => {
            let exp: i32 = text[split + 1..].parse().ok()?;
            (&text[..split], exp)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(dot) => (&mantissa[..dot], &mantissa[dot + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits: String = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let mut value = Q::new(numer, ten_pow(frac_part.len() as i32));
    if exponent != 0 {
        let scale = ten_pow(exponent.abs());
        if exponent > 0 {
            value *= Q::from_integer(scale);
        } else {
            value /= Q::from_integer(scale);
        }
    }
    Some(value)
}

fn ten_pow(k: i32) -> BigInt {
    num::pow::pow(BigInt::from(10), k as usize)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    at: usize,
    symbols: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.at).cloned();
        if tok.is_some() {
            self.at += 1;
        }
        tok
    }

    fn expect(&mut self, kind: TokenKind, expected: &'static str) -> Result<(), ParseError> {
        match self.next() {
            Some(tok) if tok.kind == kind => Ok(()),
            Some(tok) => Err(ParseError::UnexpectedToken {
                pos: tok.pos,
                found: tok.kind.describe(),
                expected,
            }),
            None => Err(ParseError::UnexpectedEnd { expected }),
        }
    }

    fn expr(&mut self) -> Result<ExprRef, ParseError> {
        let mut terms = vec![self.term()?];
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Plus => {
                    self.next();
                    terms.push(self.term()?);
                }
                TokenKind::Minus => {
                    self.next();
                    let t = self.term()?;
                    terms.push(Expr::neg(t));
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<ExprRef, ParseError> {
        let mut acc = self.factor()?;
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Star => {
                    self.next();
                    let rhs = self.factor()?;
                    acc = Expr::prod(vec![acc, rhs]);
                }
                TokenKind::Slash => {
                    self.next();
                    let rhs = self.factor()?;
                    acc = Expr::div(acc, rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ExprRef, ParseError> {
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Minus {
                self.next();
                let inner = self.factor()?;
                return Ok(Expr::neg(inner));
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<ExprRef, ParseError> {
        let base = self.atom()?;
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Caret {
                self.next();
                let exponent = self.factor()?;
                return Ok(Expr::pow(base, exponent));
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprRef, ParseError> {
        let tok = self
            .next()
            .ok_or(ParseError::UnexpectedEnd { expected: "a value" })?;
        match tok.kind {
            TokenKind::Num(q) => Ok(Expr::from_q(q)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => self.identifier(name, tok.pos),
            other => Err(ParseError::UnexpectedToken {
                pos: tok.pos,
                found: other.describe(),
                expected: "a value",
            }),
        }
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<ExprRef, ParseError> {
        if name == "exp" || name == "log" {
            self.expect(TokenKind::LParen, "'(' after function name")?;
            let arg = self.expr()?;
            self.expect(TokenKind::RParen, "')'")?;
            return Ok(if name == "exp" { Expr::exp(arg) } else { Expr::log(arg) });
        }
        if name == "i" {
            return Ok(Expr::imag_unit());
        }
        let followed_by_paren =
            matches!(self.peek(), Some(t) if t.kind == TokenKind::LParen);
        if self.symbols.is_var(&name) {
            if followed_by_paren {
                return Err(ParseError::NotAFunction { pos, name });
            }
            Ok(Expr::var(&name))
        } else if self.symbols.is_param(&name) {
            if followed_by_paren {
                return Err(ParseError::NotAFunction { pos, name });
            }
            Ok(Expr::param(&name))
        } else {
            Err(ParseError::UnknownSymbol { pos, name })
        }
    }
}
