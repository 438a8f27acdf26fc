//! Expression language for functions, polyvectors and forms.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' int)? | atom '^^' factor
//! atom   := rational | 'h' | var | 'D'var | 'd/d'var | 'd'var | '(' expr ')'
//! ```
//!
//! `h` stands for ħ. Identifiers that name a declared variable are always
//! variables; otherwise a leading `D` or `d` marks a basis vector or form.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use poisson_core::calculus::{DiffForm, PolyVector};
use poisson_core::{HPoly, Poly, Ring};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Type,
    UnknownVariable,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::Type => "type error",
            DiagnosticKind::UnknownVariable => "unknown variable",
        })
    }
}

/// A parse or evaluation error pointing into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {message} (at {}..{})", span.start, span.end)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            kind,
            message: message.into(),
            span,
        }
    }

    /// Message followed by the source line and a caret marker.
    pub fn render(&self, src: &str) -> String {
        let width = self.span.end.saturating_sub(self.span.start).max(1);
        let pad = src[..self.span.start.min(src.len())].chars().count();
        format!(
            "{}: {}\n  {}\n  {}{}",
            self.kind,
            self.message,
            src,
            " ".repeat(pad),
            "^".repeat(width)
        )
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Number(BigRational),
    Hbar,
    Var(String),
    Vector(String),
    Form(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Wedge(Box<Expr>, Box<Expr>),
}

/// A parsed expression. Equality ignores source spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Number(a), Number(b)) => a == b,
            (Hbar, Hbar) => true,
            (Var(a), Var(b)) | (Vector(a), Vector(b)) | (Form(a), Form(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Pow(a, m), Pow(b, n)) => a == b && m == n,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Wedge(a, b), Wedge(c, d)) => a == c && b == d,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    DSlash(String),
    Plus,
    Minus,
    Star,
    Caret,
    Wedge,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number `{}`", fmt_rational(n)),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::DSlash(s) => write!(f, "`d/d{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Wedge => f.write_str("`^^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    let ident_end = |mut j: usize| {
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |t: Tok| {
            (
                t,
                Span {
                    start,
                    end: start + 1,
                },
            )
        };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push(single(Tok::Plus)),
            b'-' => out.push(single(Tok::Minus)),
            b'*' => out.push(single(Tok::Star)),
            b'(' => out.push(single(Tok::LParen)),
            b')' => out.push(single(Tok::RParen)),
            b'^' if bytes.get(i + 1) == Some(&b'^') => {
                out.push((
                    Tok::Wedge,
                    Span {
                        start,
                        end: start + 2,
                    },
                ));
                i += 2;
                continue;
            }
            b'^' => out.push(single(Tok::Caret)),
            b'0'..=b'9' => {
                let mut end = digits(i);
                let numer: BigRational = src[i..end].parse::<num_bigint::BigInt>().unwrap().into();
                let mut value = numer;
                if bytes.get(end) == Some(&b'/')
                    && bytes.get(end + 1).is_some_and(u8::is_ascii_digit)
                {
                    let dend = digits(end + 1);
                    let denom: num_bigint::BigInt = src[end + 1..dend].parse().unwrap();
                    if denom.is_zero() {
                        return Err(Diagnostic::new(
                            DiagnosticKind::Syntax,
                            "zero denominator",
                            Span { start, end: dend },
                        ));
                    }
                    value /= BigRational::from_integer(denom);
                    end = dend;
                }
                out.push((Tok::Num(value), Span { start, end }));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                if src[i..].starts_with("d/d")
                    && bytes.get(i + 3).is_some_and(u8::is_ascii_alphabetic)
                {
                    let end = ident_end(i + 3);
                    out.push((
                        Tok::DSlash(src[i + 3..end].to_string()),
                        Span { start, end },
                    ));
                    i = end;
                    continue;
                }
                let end = ident_end(i);
                out.push((Tok::Ident(src[i..end].to_string()), Span { start, end }));
                i = end;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(Diagnostic::new(
                    DiagnosticKind::Syntax,
                    format!("unexpected character `{ch}`"),
                    Span {
                        start,
                        end: start + ch.len_utf8(),
                    },
                ));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    vars: &'a [String],
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map(|(_, s)| *s).unwrap_or(Span {
            start: self.len,
            end: self.len,
        })
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn error(&self, what: &str) -> Diagnostic {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => t.to_string(),
        };
        Diagnostic::new(
            DiagnosticKind::Syntax,
            format!("expected {what}, found {found}"),
            self.span(),
        )
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = if self.peek() == Some(&Tok::Minus) {
            let (_, s) = self.bump();
            let t = self.term()?;
            let span = s.join(t.span);
            Expr {
                kind: ExprKind::Neg(Box::new(t)),
                span,
            }
        } else {
            self.term()?
        };
        while let Some(op @ (Tok::Plus | Tok::Minus)) = self.peek().cloned() {
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            let (l, r) = (Box::new(lhs), Box::new(rhs));
            lhs = Expr {
                kind: if op == Tok::Plus {
                    ExprKind::Add(l, r)
                } else {
                    ExprKind::Sub(l, r)
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let rhs = self.factor()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, Diagnostic> {
        let base = self.atom()?;
        match self.peek() {
            Some(Tok::Caret) => {
                self.bump();
                let neg = self.peek() == Some(&Tok::Minus);
                if neg {
                    self.bump();
                }
                let (tok, s) = match self.peek() {
                    Some(Tok::Num(_)) => self.bump(),
                    _ => return Err(self.error("an integer exponent")),
                };
                let Tok::Num(n) = tok else { unreachable!() };
                let exp = if n.is_integer() {
                    i64::try_from(n.to_integer()).ok()
                } else {
                    None
                };
                let Some(exp) = exp else {
                    return Err(Diagnostic::new(
                        DiagnosticKind::Syntax,
                        "exponent must be a small integer",
                        s,
                    ));
                };
                let span = base.span.join(s);
                Ok(Expr {
                    kind: ExprKind::Pow(Box::new(base), if neg { -exp } else { exp }),
                    span,
                })
            }
            Some(Tok::Wedge) => {
                self.bump();
                let rhs = self.factor()?;
                let span = base.span.join(rhs.span);
                Ok(Expr {
                    kind: ExprKind::Wedge(Box::new(base), Box::new(rhs)),
                    span,
                })
            }
            _ => Ok(base),
        }
    }

    fn atom(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek() {
            Some(Tok::Num(_) | Tok::Ident(_) | Tok::DSlash(_)) => {
                let (tok, span) = self.bump();
                let kind = match tok {
                    Tok::Num(n) => ExprKind::Number(n),
                    Tok::DSlash(name) => ExprKind::Vector(name),
                    Tok::Ident(name) => self.classify(name),
                    _ => unreachable!(),
                };
                Ok(Expr { kind, span })
            }
            Some(Tok::LParen) => {
                let (_, open) = self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("`)`"));
                }
                let (_, close) = self.bump();
                Ok(Expr {
                    span: open.join(close),
                    ..inner
                })
            }
            _ => Err(self.error("a number, variable, `h`, basis element or `(`")),
        }
    }

    fn classify(&self, name: String) -> ExprKind {
        if name == "h" {
            return ExprKind::Hbar;
        }
        if self.vars.contains(&name) {
            return ExprKind::Var(name);
        }
        let rest = &name[1..];
        let starts_ident = rest.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        match name.as_bytes()[0] {
            b'D' if starts_ident => ExprKind::Vector(rest.to_string()),
            b'd' if starts_ident => ExprKind::Form(rest.to_string()),
            _ => ExprKind::Var(name),
        }
    }
}

/// Parses `src`; `vars` lists declared variable names (may be empty).
pub fn parse(src: &str, vars: &[String]) -> Result<Expr, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        len: src.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

/// Variable names mentioned by an expression, in order of appearance.
pub fn identifiers(e: &Expr) -> Vec<String> {
    fn walk(e: &Expr, out: &mut Vec<String>) {
        match &e.kind {
            ExprKind::Var(n) | ExprKind::Vector(n) | ExprKind::Form(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            ExprKind::Neg(a) | ExprKind::Pow(a, _) => walk(a, out),
            ExprKind::Add(a, b)
            | ExprKind::Sub(a, b)
            | ExprKind::Mul(a, b)
            | ExprKind::Wedge(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            ExprKind::Number(_) | ExprKind::Hbar => {}
        }
    }
    let mut out = Vec::new();
    walk(e, &mut out);
    out
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders an expression so that it parses back to an equal tree.
pub fn render(e: &Expr) -> String {
    fn go(e: &Expr, level: u8) -> String {
        let (text, own) = match &e.kind {
            ExprKind::Number(q) if q.is_negative() => (format!("-{}", fmt_rational(&-q)), 0),
            ExprKind::Number(q) => (fmt_rational(q), 3),
            ExprKind::Hbar => ("h".to_string(), 3),
            ExprKind::Var(n) => (n.clone(), 3),
            ExprKind::Vector(n) => (format!("D{n}"), 3),
            ExprKind::Form(n) => (format!("d{n}"), 3),
            ExprKind::Neg(a) => (format!("-{}", go(a, 1)), 0),
            ExprKind::Add(a, b) => (format!("{} + {}", go(a, 0), go(b, 1)), 0),
            ExprKind::Sub(a, b) => (format!("{} - {}", go(a, 0), go(b, 1)), 0),
            ExprKind::Mul(a, b) => (format!("{}*{}", go(a, 1), go(b, 2)), 1),
            ExprKind::Pow(a, n) => (format!("{}^{n}", go(a, 3)), 2),
            ExprKind::Wedge(a, b) => (format!("{}^^{}", go(a, 3), go(b, 2)), 2),
        };
        if own < level {
            format!("({text})")
        } else {
            text
        }
    }
    go(e, 0)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// The value of an expression in a ring at a truncation order.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(HPoly),
    Vector(PolyVector),
    Form(DiffForm),
}

impl Value {
    fn describe(&self) -> String {
        match self {
            Value::Scalar(_) => "a function".to_string(),
            Value::Vector(v) => format!("a {}-vector", v.degree()),
            Value::Form(w) => format!("a {}-form", w.degree()),
        }
    }
}

/// Ring, order and reserved names used when evaluating expressions.
#[derive(Debug, Clone)]
pub struct Context {
    pub ring: Ring,
    pub order: usize,
    pub reserved: Vec<String>,
}

impl Context {
    fn index(&self, name: &str, span: Span) -> Result<usize, Diagnostic> {
        if self.reserved.iter().any(|r| r == name) {
            return Err(Diagnostic::new(
                DiagnosticKind::UnknownVariable,
                format!("`{name}` is reserved in this command"),
                span,
            ));
        }
        self.ring.index_of(name).map_err(|_| {
            Diagnostic::new(
                DiagnosticKind::UnknownVariable,
                format!(
                    "`{name}` is not a variable of the ring ({})",
                    self.ring.names().join(", ")
                ),
                span,
            )
        })
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, Diagnostic> {
        let ty = |msg: String| Diagnostic::new(DiagnosticKind::Type, msg, e.span);
        let scalar = |p: Poly| Value::Scalar(HPoly::from_poly(p, self.order));
        Ok(match &e.kind {
            ExprKind::Number(q) => scalar(Poly::constant(&self.ring, q.clone())),
            ExprKind::Hbar => Value::Scalar(HPoly::hbar(&self.ring, self.order)),
            ExprKind::Var(n) => scalar(Poly::var(&self.ring, self.index(n, e.span)?)),
            ExprKind::Vector(n) => Value::Vector(
                PolyVector::basis(&self.ring, &[self.index(n, e.span)?], self.order).unwrap(),
            ),
            ExprKind::Form(n) => Value::Form(
                DiffForm::basis(&self.ring, &[self.index(n, e.span)?], self.order).unwrap(),
            ),
            ExprKind::Neg(a) => match self.eval(a)? {
                Value::Scalar(s) => Value::Scalar(s.neg()),
                Value::Vector(v) => Value::Vector(v.neg()),
                Value::Form(w) => Value::Form(w.neg()),
            },
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let sub = matches!(e.kind, ExprKind::Sub(..));
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                match (x, y) {
                    (Value::Scalar(x), Value::Scalar(y)) => {
                        Value::Scalar(if sub { x.sub(&y) } else { x.add(&y) })
                    }
                    (Value::Vector(x), Value::Vector(y)) if x.degree() == y.degree() => {
                        Value::Vector(if sub { x.sub(&y) } else { x.add(&y) })
                    }
                    (Value::Form(x), Value::Form(y)) if x.degree() == y.degree() => {
                        Value::Form(if sub { x.sub(&y) } else { x.add(&y) })
                    }
                    (x, y) => {
                        return Err(ty(format!(
                            "cannot add {} and {}",
                            x.describe(),
                            y.describe()
                        )))
                    }
                }
            }
            ExprKind::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x.mul(&y)),
                (Value::Scalar(s), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(s)) => {
                    Value::Vector(v.mul_fn(&s))
                }
                (Value::Scalar(s), Value::Form(w)) | (Value::Form(w), Value::Scalar(s)) => {
                    Value::Form(w.mul_fn(&s))
                }
                (x, y) => {
                    return Err(ty(format!(
                        "cannot multiply {} by {}; use `^^` for the wedge product",
                        x.describe(),
                        y.describe()
                    )))
                }
            },
            ExprKind::Wedge(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x.mul(&y)),
                (Value::Scalar(s), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(s)) => {
                    Value::Vector(v.mul_fn(&s))
                }
                (Value::Scalar(s), Value::Form(w)) | (Value::Form(w), Value::Scalar(s)) => {
                    Value::Form(w.mul_fn(&s))
                }
                (Value::Vector(x), Value::Vector(y)) => Value::Vector(x.wedge(&y).unwrap()),
                (Value::Form(x), Value::Form(y)) => Value::Form(x.wedge(&y).unwrap()),
                (x, y) => {
                    return Err(ty(format!(
                        "cannot wedge {} with {}",
                        x.describe(),
                        y.describe()
                    )))
                }
            },
            ExprKind::Pow(a, n) => match self.eval(a)? {
                Value::Scalar(s) => Value::Scalar(
                    s.powi(*n)
                        .map_err(|err| ty(format!("negative power of a non-unit: {err}")))?,
                ),
                x => return Err(ty(format!("cannot raise {} to a power", x.describe()))),
            },
        })
    }

    pub fn scalar(&self, e: &Expr) -> Result<HPoly, Diagnostic> {
        match self.eval(e)? {
            Value::Scalar(s) => Ok(s),
            other => Err(Diagnostic::new(
                DiagnosticKind::Type,
                format!("expected a function, found {}", other.describe()),
                e.span,
            )),
        }
    }

    /// A polyvector of the given degree; `0` and functions are accepted
    /// where they make sense.
    pub fn polyvector(&self, e: &Expr, degree: usize) -> Result<PolyVector, Diagnostic> {
        match self.eval(e)? {
            Value::Vector(v) if v.degree() == degree => Ok(v),
            Value::Scalar(s) if s.is_zero() => Ok(PolyVector::zero(&self.ring, degree, self.order)),
            Value::Scalar(s) if degree == 0 => Ok(PolyVector::function(s)),
            other => Err(Diagnostic::new(
                DiagnosticKind::Type,
                format!("expected a {degree}-vector, found {}", other.describe()),
                e.span,
            )),
        }
    }

    pub fn form(&self, e: &Expr, degree: usize) -> Result<DiffForm, Diagnostic> {
        match self.eval(e)? {
            Value::Form(w) if w.degree() == degree => Ok(w),
            Value::Scalar(s) if s.is_zero() => Ok(DiffForm::zero(&self.ring, degree, self.order)),
            Value::Scalar(s) if degree == 0 => Ok(DiffForm::function(s)),
            other => Err(Diagnostic::new(
                DiagnosticKind::Type,
                format!("expected a {degree}-form, found {}", other.describe()),
                e.span,
            )),
        }
    }
}
