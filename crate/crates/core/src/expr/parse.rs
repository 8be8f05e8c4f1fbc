//! Recursive-descent parser for the expression surface grammar.
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := factor { "*" factor }
//! factor := base [ "^" nat ]
//! base   := number | ident | func "(" expr ")" | "(" expr ")" | "-" base
//! ```
//!
//! `number` is an unsigned decimal literal (`2`, `0.25`), read exactly as a
//! rational.  `ident` is `x` followed by a variable index; `func` is one of
//! the five smooth primitives.  Division, roots, logarithms, absolute
//! values, and fractional or negative powers are reported as non-smooth
//! constructs rather than generic syntax errors, since rejecting them is the
//! point: everything that parses denotes a globally smooth function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::pow;
use std::sync::Arc;

use super::{nconst, nneg, npow, nprim, nprod, nsum, nvar, Node, Primitive, SmoothExpr};

/// Errors produced while parsing expression text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-smooth construct at byte {pos}: {what}")]
    NonSmooth { pos: usize, what: String },
    #[error("variable x{index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
}

/// Identifiers recognized as deliberately unsupported, so their rejection
/// names the reason instead of claiming a typo.
const NON_SMOOTH_NAMES: &[&str] = &["log", "ln", "sqrt", "abs", "sign", "floor", "pow"];

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token with its starting byte offset, or `None` at end of input.
    fn next(&mut self) -> Result<Option<(Token, usize)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.text.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.text[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Token::Plus
            }
            b'-' => {
                self.pos += 1;
                Token::Minus
            }
            b'*' => {
                self.pos += 1;
                Token::Star
            }
            b'^' => {
                self.pos += 1;
                Token::Caret
            }
            b'(' => {
                self.pos += 1;
                Token::LParen
            }
            b')' => {
                self.pos += 1;
                Token::RParen
            }
            b'/' => {
                return Err(ParseError::NonSmooth {
                    pos: start,
                    what: "division".to_string(),
                })
            }
            b'0'..=b'9' => {
                let mut int_digits = String::new();
                while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
                    int_digits.push(self.text[self.pos] as char);
                    self.pos += 1;
                }
                let mut frac_digits = String::new();
                if self.pos < self.text.len() && self.text[self.pos] == b'.' {
                    self.pos += 1;
                    while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
                        frac_digits.push(self.text[self.pos] as char);
                        self.pos += 1;
                    }
                    if frac_digits.is_empty() {
                        return Err(ParseError::Syntax {
                            pos: self.pos,
                            msg: "expected digits after decimal point".to_string(),
                        });
                    }
                }
                let digits = format!("{int_digits}{frac_digits}");
                let numer: BigInt = digits.parse().expect("ascii digits");
                let denom = pow(BigInt::from(10), frac_digits.len());
                Token::Number(BigRational::new(numer, denom))
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while self.pos < self.text.len() && self.text[self.pos].is_ascii_alphanumeric() {
                    name.push(self.text[self.pos] as char);
                    self.pos += 1;
                }
                Token::Ident(name)
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((tok, start)))
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    end: usize,
    cursor: usize,
    arity: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(t, _)| t)
    }

    fn peek_pos(&self) -> usize {
        self.tokens
            .get(self.cursor)
            .map(|&(_, p)| p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.cursor).cloned();
        self.cursor += 1;
        t
    }

    fn expect(&mut self, want: Token, desc: &str) -> Result<(), ParseError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            other => Err(ParseError::Syntax {
                pos: other.map(|(_, p)| p).unwrap_or(self.end),
                msg: format!("expected {desc}"),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut terms = vec![self.parse_term()?];
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    terms.push(self.parse_term()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    terms.push(nneg(t));
                }
                _ => break,
            }
        }
        Ok(nsum(terms))
    }

    fn parse_term(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut factors = vec![self.parse_factor()?];
        while matches!(self.peek(), Some(Token::Star)) {
            self.bump();
            factors.push(self.parse_factor()?);
        }
        Ok(nprod(factors))
    }

    fn parse_factor(&mut self) -> Result<Arc<Node>, ParseError> {
        let base = self.parse_base()?;
        if !matches!(self.peek(), Some(Token::Caret)) {
            return Ok(base);
        }
        self.bump();
        let pos = self.peek_pos();
        match self.bump() {
            Some((Token::Number(q), _)) => {
                if !q.is_integer() {
                    return Err(ParseError::NonSmooth {
                        pos,
                        what: "fractional power".to_string(),
                    });
                }
                let exponent: u32 = q.to_integer().try_into().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "exponent too large".to_string(),
                })?;
                Ok(npow(base, exponent))
            }
            Some((Token::Minus, _)) => Err(ParseError::NonSmooth {
                pos,
                what: "negative power".to_string(),
            }),
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected natural-number exponent".to_string(),
            }),
        }
    }

    fn parse_base(&mut self) -> Result<Arc<Node>, ParseError> {
        let pos = self.peek_pos();
        match self.bump() {
            Some((Token::Number(q), _)) => Ok(nconst(q)),
            Some((Token::Minus, _)) => Ok(nneg(self.parse_base()?)),
            Some((Token::LParen, _)) => {
                let e = self.parse_expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(e)
            }
            Some((Token::Ident(name), _)) => self.ident_base(&name, pos),
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected number, variable, function, `(`, or `-`".to_string(),
            }),
        }
    }

    fn ident_base(&mut self, name: &str, pos: usize) -> Result<Arc<Node>, ParseError> {
        for p in [
            Primitive::Exp,
            Primitive::Sin,
            Primitive::Cos,
            Primitive::Atan,
            Primitive::Tanh,
        ] {
            if name == p.name() {
                self.expect(Token::LParen, "`(` after function name")?;
                let arg = self.parse_expr()?;
                self.expect(Token::RParen, "`)`")?;
                return Ok(nprim(p, arg));
            }
        }
        if NON_SMOOTH_NAMES.contains(&name) {
            return Err(ParseError::NonSmooth {
                pos,
                what: format!("`{name}`"),
            });
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "variable index too large".to_string(),
                })?;
                if index == 0 || index > self.arity {
                    return Err(ParseError::VariableOutOfRange {
                        index,
                        arity: self.arity,
                    });
                }
                return Ok(nvar(index));
            }
        }
        Err(ParseError::Syntax {
            pos,
            msg: format!("unknown identifier `{name}`"),
        })
    }
}

/// Parses `text` as an expression of the given arity.
pub(super) fn parse(text: &str, arity: usize) -> Result<SmoothExpr, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next()? {
        tokens.push(t);
    }
    let mut parser = Parser {
        tokens,
        end: text.len(),
        cursor: 0,
        arity,
    };
    let root = parser.parse_expr()?;
    if parser.cursor < parser.tokens.len() {
        return Err(ParseError::Syntax {
            pos: parser.peek_pos(),
            msg: "unexpected trailing input".to_string(),
        });
    }
    Ok(SmoothExpr { arity, root })
}
