//! Warping-function expression language.
//!
//! Grammar:
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' integer)? | '-' factor
//! atom   := number | 't' | ident '(' expr ')' | '(' expr ')'
//! ```
//! Expressions are immutable after parse; evaluation is pure and returns a
//! second-order jet so m, m' and m'' always come from the same source.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuncKind {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
}

impl FuncKind {
    fn name(self) -> &'static str {
        match self {
            FuncKind::Exp => "exp",
            FuncKind::Log => "log",
            FuncKind::Sqrt => "sqrt",
            FuncKind::Sin => "sin",
            FuncKind::Cos => "cos",
            FuncKind::Sinh => "sinh",
            FuncKind::Cosh => "cosh",
            FuncKind::Tanh => "tanh",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => FuncKind::Exp,
            "log" => FuncKind::Log,
            "sqrt" => FuncKind::Sqrt,
            "sin" => FuncKind::Sin,
            "cos" => FuncKind::Cos,
            "sinh" => FuncKind::Sinh,
            "cosh" => FuncKind::Cosh,
            "tanh" => FuncKind::Tanh,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    Var,
    Num(f64),
    Neg(Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    Pow(Box<Expression>, i32),
    Func(FuncKind, Box<Expression>),
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Var => write!(f, "t"),
            Expression::Num(x) => write!(f, "{x}"),
            Expression::Neg(a) => write!(f, "(-{a})"),
            Expression::Add(a, b) => write!(f, "({a} + {b})"),
            Expression::Sub(a, b) => write!(f, "({a} - {b})"),
            Expression::Mul(a, b) => write!(f, "({a} * {b})"),
            Expression::Div(a, b) => write!(f, "({a} / {b})"),
            Expression::Pow(a, n) => write!(f, "({a}^{n})"),
            Expression::Func(k, a) => write!(f, "{}({a})", k.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
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
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token with its starting byte offset, or None at end of input.
    fn next(&mut self) -> Result<Option<(Tok, usize)>> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
                {
                    end += 1;
                }
                // optional exponent part
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut e = end + 1;
                    if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                        e += 1;
                    }
                    if e < self.src.len() && self.src[e].is_ascii_digit() {
                        while e < self.src.len() && self.src[e].is_ascii_digit() {
                            e += 1;
                        }
                        end = e;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap();
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                self.pos = end;
                Tok::Num(value)
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_alphanumeric() {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[start..end]).unwrap().to_owned();
                self.pos = end;
                Tok::Ident(name)
            }
            other => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((tok, start)))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.idx)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end_offset, |(_, o)| *o)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize> {
        match self.bump() {
            Some((tok, off)) if tok == want => Ok(off),
            Some((tok, off)) => Err(Error::Syntax {
                offset: off,
                message: format!("expected {what}, found {tok:?}"),
            }),
            None => Err(Error::Syntax {
                offset: self.end_offset,
                message: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some((Tok::Plus, _)) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expression::Add(Box::new(lhs), Box::new(rhs));
                }
                Some((Tok::Minus, _)) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expression::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expression> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some((Tok::Star, _)) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expression::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some((Tok::Slash, _)) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expression::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expression> {
        if let Some((Tok::Minus, _)) = self.peek() {
            self.bump();
            let inner = self.factor()?;
            return Ok(Expression::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.bump();
            let n = self.integer_exponent()?;
            return Ok(Expression::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn integer_exponent(&mut self) -> Result<i32> {
        let mut sign = 1i32;
        if let Some((Tok::Minus, _)) = self.peek() {
            self.bump();
            sign = -1;
        }
        match self.bump() {
            Some((Tok::Num(x), off)) => {
                if x.fract() != 0.0 || x.abs() > f64::from(i32::MAX) {
                    return Err(Error::Syntax {
                        offset: off,
                        message: format!("exponent must be an integer, found {x}"),
                    });
                }
                Ok(sign * x as i32)
            }
            Some((tok, off)) => Err(Error::Syntax {
                offset: off,
                message: format!("expected integer exponent, found {tok:?}"),
            }),
            None => Err(Error::Syntax {
                offset: self.end_offset,
                message: "expected integer exponent, found end of input".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expression> {
        match self.bump() {
            Some((Tok::Num(x), _)) => Ok(Expression::Num(x)),
            Some((Tok::Ident(name), off)) => {
                let is_call = matches!(self.peek(), Some((Tok::LParen, _)));
                if name == "t" && !is_call {
                    return Ok(Expression::Var);
                }
                if !is_call {
                    return Err(Error::Syntax {
                        offset: off,
                        message: format!("unknown identifier `{name}`"),
                    });
                }
                let kind = FuncKind::from_name(&name)
                    .ok_or(Error::UnknownFunction { name: name.clone(), offset: off })?;
                self.expect(Tok::LParen, "`(`")?;
                let arg = self.expr()?;
                if let Some((Tok::Comma, _)) = self.peek() {
                    return Err(Error::ArityMismatch { name, offset: self.here() });
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expression::Func(kind, Box::new(arg)))
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some((tok, off)) => Err(Error::Syntax {
                offset: off,
                message: format!("expected number, `t`, function call or `(`, found {tok:?}"),
            }),
            None => Err(Error::Syntax {
                offset: self.end_offset,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

pub fn parse(source: &str) -> Result<Expression> {
    let mut lexer = Lexer::new(source);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    if toks.is_empty() {
        return Err(Error::Syntax { offset: 0, message: "empty expression".into() });
    }
    let mut parser = Parser { toks, idx: 0, end_offset: source.len() };
    let e = parser.expr()?;
    if let Some((tok, off)) = parser.peek() {
        return Err(Error::Syntax {
            offset: *off,
            message: format!("trailing input starting with {tok:?}"),
        });
    }
    Ok(e)
}

/// Evaluate `e` and its first two t-derivatives at `t`.
pub fn eval_jet(e: &Expression, t: f64) -> Result<Jet2> {
    let j = eval_inner(e, t)?;
    if !j.is_finite() {
        return Err(Error::EvalDomain {
            t,
            message: "expression value or derivative is not finite".into(),
        });
    }
    Ok(j)
}

fn eval_inner(e: &Expression, t: f64) -> Result<Jet2> {
    Ok(match e {
        Expression::Var => Jet2::variable(t),
        Expression::Num(x) => Jet2::constant(*x),
        Expression::Neg(a) => -eval_inner(a, t)?,
        Expression::Add(a, b) => eval_inner(a, t)? + eval_inner(b, t)?,
        Expression::Sub(a, b) => eval_inner(a, t)? - eval_inner(b, t)?,
        Expression::Mul(a, b) => eval_inner(a, t)? * eval_inner(b, t)?,
        Expression::Div(a, b) => {
            let num = eval_inner(a, t)?;
            let den = eval_inner(b, t)?;
            if den.v == 0.0 {
                return Err(Error::EvalDomain { t, message: "division by zero".into() });
            }
            num / den
        }
        Expression::Pow(a, n) => {
            let base = eval_inner(a, t)?;
            if *n < 0 && base.v == 0.0 {
                return Err(Error::EvalDomain {
                    t,
                    message: "zero raised to a negative power".into(),
                });
            }
            base.powi(*n)
        }
        Expression::Func(kind, a) => {
            let arg = eval_inner(a, t)?;
            match kind {
                FuncKind::Exp => arg.exp(),
                FuncKind::Log => {
                    if arg.v <= 0.0 {
                        return Err(Error::EvalDomain {
                            t,
                            message: format!("log of non-positive value {}", arg.v),
                        });
                    }
                    arg.ln()
                }
                FuncKind::Sqrt => {
                    if arg.v < 0.0 {
                        return Err(Error::EvalDomain {
                            t,
                            message: format!("sqrt of negative value {}", arg.v),
                        });
                    }
                    arg.sqrt()
                }
                FuncKind::Sin => arg.sin(),
                FuncKind::Cos => arg.cos(),
                FuncKind::Sinh => arg.sinh(),
                FuncKind::Cosh => arg.cosh(),
                FuncKind::Tanh => arg.tanh(),
            }
        }
    })
}
