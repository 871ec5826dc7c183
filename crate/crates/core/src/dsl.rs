//! Expression language for generating functions, polarizations and sources.
//!
//! Grammar: standard precedence (`^` above unary minus above `*` `/` above
//! `+` `-`), `^` right-associative with constant exponent, whitespace
//! insensitive, calls from a fixed function vocabulary. Every parse error
//! carries a byte offset and the expected-token set.

use crate::error::{Error, Result};
use crate::field::Field;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Byte range of a node in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Known variables and the coordinate slot each resolves to by default.
/// `r` and `theta` alias the first two chart coordinates; Kerr-Sen charts
/// rebind `r` to the radial reparametrization instead.
pub const VARIABLES: &[(&str, usize)] = &[
    ("x1", 0),
    ("x2", 1),
    ("v", 2),
    ("phi", 2),
    ("t", 3),
    ("r", 0),
    ("theta", 1),
];

const FUNCTIONS: &[&str] = &[
    "sin", "cos", "tan", "sinh", "cosh", "tanh", "sech", "exp", "ln", "sqrt", "abs",
];

/// Expression AST. Equality ignores spans.
#[derive(Clone, Debug)]
pub enum Expr {
    Number(f64, Span),
    /// Coordinate variable (name as written).
    Var(String, Span),
    /// Named parameter to be supplied at bind time.
    Param(String, Span),
    Neg(Box<Expr>, Span),
    Add(Box<Expr>, Box<Expr>, Span),
    Sub(Box<Expr>, Box<Expr>, Span),
    Mul(Box<Expr>, Box<Expr>, Span),
    Div(Box<Expr>, Box<Expr>, Span),
    /// Base raised to a constant exponent.
    Pow(Box<Expr>, f64, Span),
    Call(&'static str, Box<Expr>, Span),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use Expr::*;
        match (self, other) {
            (Number(a, _), Number(b, _)) => a == b,
            (Var(a, _), Var(b, _)) => a == b,
            (Param(a, _), Param(b, _)) => a == b,
            (Neg(a, _), Neg(b, _)) => a == b,
            (Add(a, c, _), Add(b, d, _)) => a == b && c == d,
            (Sub(a, c, _), Sub(b, d, _)) => a == b && c == d,
            (Mul(a, c, _), Mul(b, d, _)) => a == b && c == d,
            (Div(a, c, _), Div(b, d, _)) => a == b && c == d,
            (Pow(a, c, _), Pow(b, d, _)) => a == b && c == d,
            (Call(a, c, _), Call(b, d, _)) => a == b && c == d,
            _ => false,
        }
    }
}

pub fn span_of(e: &Expr) -> Span {
    use Expr::*;
    match e {
        Number(_, s) | Var(_, s) | Param(_, s) | Neg(_, s) | Add(_, _, s) | Sub(_, _, s)
        | Mul(_, _, s) | Div(_, _, s) | Pow(_, _, s) | Call(_, _, s) => *s,
    }
}

// ---------------------------------------------------------------- lexer --

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
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, Span)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, Span { start, end: start }));
        }
        let c = self.src[self.pos];
        let simple = |t: Tok, l: &mut Lexer| {
            l.pos += 1;
            Ok((
                t,
                Span {
                    start,
                    end: l.pos,
                },
            ))
        };
        match c {
            b'+' => simple(Tok::Plus, self),
            b'-' => simple(Tok::Minus, self),
            b'*' => simple(Tok::Star, self),
            b'/' => simple(Tok::Slash, self),
            b'^' => simple(Tok::Caret, self),
            b'(' => simple(Tok::LParen, self),
            b')' => simple(Tok::RParen, self),
            b'0'..=b'9' | b'.' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                // exponent part
                if self.pos < self.src.len() && (self.src[self.pos] | 32) == b'e' {
                    let save = self.pos;
                    self.pos += 1;
                    if self.pos < self.src.len()
                        && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                    {
                        self.pos += 1;
                    }
                    if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                    } else {
                        self.pos = save;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: f64 = text.parse().map_err(|_| Error::Parse {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                    expected: vec!["number".into()],
                })?;
                Ok((
                    Tok::Num(v),
                    Span {
                        start,
                        end: self.pos,
                    },
                ))
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok((
                    Tok::Ident(text.to_string()),
                    Span {
                        start,
                        end: self.pos,
                    },
                ))
            }
            _ => Err(Error::Parse {
                offset: start,
                message: format!("unexpected character `{}`", c as char),
                expected: vec!["expression".into()],
            }),
        }
    }
}

// --------------------------------------------------------------- parser --

struct Parser {
    toks: Vec<(Tok, Span)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Span) {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Span> {
        let (t, s) = self.peek().clone();
        if t == tok {
            self.bump();
            Ok(s)
        } else {
            Err(Error::Parse {
                offset: s.start,
                message: format!("found {}", describe(&t)),
                expected: vec![what.to_string()],
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    let sp = join(span_of(&lhs), span_of(&rhs));
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs), sp);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    let sp = join(span_of(&lhs), span_of(&rhs));
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs), sp);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    let sp = join(span_of(&lhs), span_of(&rhs));
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs), sp);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    let sp = join(span_of(&lhs), span_of(&rhs));
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs), sp);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if let (Tok::Minus, s) = self.peek().clone() {
            self.bump();
            let inner = self.unary()?;
            let sp = join(s, span_of(&inner));
            return Ok(Expr::Neg(Box::new(inner), sp));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            // exponent: optionally signed numeric literal (constant by design)
            let neg = if self.peek().0 == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let (t, s) = self.bump();
            let v = match t {
                Tok::Num(v) => v,
                other => {
                    return Err(Error::Parse {
                        offset: s.start,
                        message: format!("found {} as exponent", describe(&other)),
                        expected: vec!["numeric constant exponent".into()],
                    })
                }
            };
            let sp = join(span_of(&base), s);
            return Ok(Expr::Pow(
                Box::new(base),
                if neg { -v } else { v },
                sp,
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let (t, s) = self.bump();
        match t {
            Tok::Num(v) => Ok(Expr::Number(v, s)),
            Tok::LParen => {
                let inner = self.expr()?;
                let end = self.expect(Tok::RParen, ")")?;
                // keep the structure; parenthesization is not a node
                let _ = end;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = FUNCTIONS.iter().find(|f| **f == name) {
                    self.expect(Tok::LParen, "(")?;
                    let arg = self.expr()?;
                    let end = self.expect(Tok::RParen, ")")?;
                    Ok(Expr::Call(func, Box::new(arg), join(s, end)))
                } else if VARIABLES.iter().any(|(v, _)| *v == name) {
                    Ok(Expr::Var(name, s))
                } else {
                    Ok(Expr::Param(name, s))
                }
            }
            other => Err(Error::Parse {
                offset: s.start,
                message: format!("found {}", describe(&other)),
                expected: vec![
                    "number".into(),
                    "identifier".into(),
                    "(".into(),
                    "-".into(),
                ],
            }),
        }
    }
}

fn join(a: Span, b: Span) -> Span {
    Span {
        start: a.start.min(b.start),
        end: a.end.max(b.end),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parse an expression string to an AST.
pub fn parse(text: &str) -> Result<Expr> {
    let mut lx = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let (t, s) = lx.next()?;
        let eof = t == Tok::Eof;
        toks.push((t, s));
        if eof {
            break;
        }
    }
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    let (t, s) = p.peek().clone();
    if t != Tok::Eof {
        return Err(Error::Parse {
            offset: s.start,
            message: format!("trailing {}", describe(&t)),
            expected: vec!["end of input".into(), "operator".into()],
        });
    }
    Ok(e)
}

// --------------------------------------------------------------- binder --

/// Binding context: parameter values plus per-variable base fields.
#[derive(Clone)]
pub struct Binder {
    pub params: BTreeMap<String, f64>,
    /// Variable name -> field override (defaults to the coordinate slot).
    pub chart: BTreeMap<String, Field>,
}

impl Binder {
    pub fn new(params: BTreeMap<String, f64>) -> Binder {
        Binder {
            params,
            chart: BTreeMap::new(),
        }
    }

    pub fn with_var(mut self, name: &str, f: Field) -> Binder {
        self.chart.insert(name.to_string(), f);
        self
    }

    fn var_field(&self, name: &str) -> Option<Field> {
        if let Some(f) = self.chart.get(name) {
            return Some(f.clone());
        }
        VARIABLES
            .iter()
            .find(|(v, _)| *v == name)
            .map(|(_, slot)| Field::coord(*slot))
    }
}

/// Bind an expression to a scalar field; every parameter must resolve.
pub fn bind(e: &Expr, binder: &Binder) -> Result<Field> {
    match e {
        Expr::Number(v, _) => Ok(Field::constant(*v)),
        Expr::Var(name, _) => binder.var_field(name).ok_or_else(|| Error::Unbound {
            name: name.clone(),
            candidates: VARIABLES.iter().map(|(v, _)| v.to_string()).collect(),
        }),
        Expr::Param(name, _) => {
            if let Some(v) = binder.params.get(name) {
                Ok(Field::constant(*v))
            } else {
                Err(Error::Unbound {
                    name: name.clone(),
                    candidates: binder.params.keys().cloned().collect(),
                })
            }
        }
        Expr::Neg(a, _) => Ok(bind(a, binder)?.neg()),
        Expr::Add(a, b, _) => Ok(bind(a, binder)?.add(&bind(b, binder)?)),
        Expr::Sub(a, b, _) => Ok(bind(a, binder)?.sub(&bind(b, binder)?)),
        Expr::Mul(a, b, _) => Ok(bind(a, binder)?.mul(&bind(b, binder)?)),
        Expr::Div(a, b, _) => Ok(bind(a, binder)?.div(&bind(b, binder)?)),
        Expr::Pow(a, r, _) => Ok(bind(a, binder)?.powf(*r)),
        Expr::Call(f, a, _) => {
            let arg = bind(a, binder)?;
            Ok(match *f {
                "sin" => arg.sin(),
                "cos" => arg.cos(),
                "tan" => arg.tan(),
                "sinh" => arg.sinh(),
                "cosh" => arg.cosh(),
                "tanh" => arg.tanh(),
                "sech" => arg.sech(),
                "exp" => arg.exp(),
                "ln" => arg.ln(),
                "sqrt" => arg.sqrt(),
                "abs" => arg.abs(),
                _ => unreachable!("function vocabulary is closed"),
            })
        }
    }
}

/// Collect free parameter names.
pub fn free_params(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Param(name, _) => {
            if !out.contains(name) {
                out.push(name.clone());
            }
        }
        Expr::Neg(a, _) | Expr::Pow(a, _, _) | Expr::Call(_, a, _) => free_params(a, out),
        Expr::Add(a, b, _) | Expr::Sub(a, b, _) | Expr::Mul(a, b, _) | Expr::Div(a, b, _) => {
            free_params(a, out);
            free_params(b, out);
        }
        _ => {}
    }
}

// -------------------------------------------------------------- printer --

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn print_prec(e: &Expr, parent: u8, out: &mut String) {
    let mine = precedence(e);
    let need = mine < parent;
    if need {
        out.push('(');
    }
    match e {
        Expr::Number(v, _) => {
            if *v < 0.0 {
                // negative literals re-parse as unary minus; print as such
                let _ = write!(out, "-{}", fmt_num(-*v));
            } else {
                out.push_str(&fmt_num(*v));
            }
        }
        Expr::Var(n, _) | Expr::Param(n, _) => out.push_str(n),
        Expr::Neg(a, _) => {
            out.push('-');
            print_prec(a, mine + 1, out);
        }
        Expr::Add(a, b, _) => {
            print_prec(a, mine, out);
            out.push_str(" + ");
            print_prec(b, mine + 1, out);
        }
        Expr::Sub(a, b, _) => {
            print_prec(a, mine, out);
            out.push_str(" - ");
            print_prec(b, mine + 1, out);
        }
        Expr::Mul(a, b, _) => {
            print_prec(a, mine, out);
            out.push('*');
            print_prec(b, mine + 1, out);
        }
        Expr::Div(a, b, _) => {
            print_prec(a, mine, out);
            out.push('/');
            print_prec(b, mine + 1, out);
        }
        Expr::Pow(a, r, _) => {
            print_prec(a, mine + 1, out);
            out.push('^');
            if *r < 0.0 {
                let _ = write!(out, "-{}", fmt_num(-*r));
            } else {
                out.push_str(&fmt_num(*r));
            }
        }
        Expr::Call(f, a, _) => {
            out.push_str(f);
            out.push('(');
            print_prec(a, 0, out);
            out.push(')');
        }
    }
    if need {
        out.push(')');
    }
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Canonical text form; `parse(print_canonical(e))` is structurally `e`.
pub fn print_canonical(e: &Expr) -> String {
    let mut s = String::new();
    print_prec(e, 0, &mut s);
    s
}
