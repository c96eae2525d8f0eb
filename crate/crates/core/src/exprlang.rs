//! A small expression language for the scalar functions `f(u)` and `a(t)`.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?        exponent is a nonnegative integer,
//!                                           right-associative and constant-folded
//! primary := number | var | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `var` is either `u` or `t`; a single expression may use only one of them.
//! Implicit multiplication (`2u`) is rejected. The only built-in function is
//! `exp`; new ones go in [`Builtin`].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Parse failure with the byte offset of the first offending token.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at offset {offset} (expected {})", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub message: String,
}

/// Evaluation failure. `offset` points at the operator or call that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at offset {offset}")]
    DivisionByZero { offset: usize },
    #[error("non-finite result at offset {offset}")]
    Overflow { offset: usize },
    #[error("non-finite argument {x}")]
    NonFiniteArgument { x: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Exp,
}

impl Builtin {
    fn name(self) -> &'static str {
        match self {
            Builtin::Exp => "exp",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(Builtin::Exp),
            _ => None,
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Builtin::Exp => x.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree node. `offset` is the source position of the token that
/// introduced the node; it is carried for diagnostics only and ignored by
/// [`Expr::same_shape`].
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Builtin, Box<Expr>),
}

impl Expr {
    fn new(kind: ExprKind, offset: usize) -> Self {
        Self { kind, offset }
    }

    /// Structural equality, ignoring source offsets. Literals compare bitwise.
    pub fn same_shape(&self, other: &Expr) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Num(a), Num(b)) => a.to_bits() == b.to_bits(),
            (Var, Var) => true,
            (Neg(a), Neg(b)) => a.same_shape(b),
            (Binary(o1, l1, r1), Binary(o2, l2, r2)) => {
                o1 == o2 && l1.same_shape(l2) && r1.same_shape(r2)
            }
            (Pow(a, k1), Pow(b, k2)) => k1 == k2 && a.same_shape(b),
            (Call(f1, a), Call(f2, b)) => f1 == f2 && a.same_shape(b),
            _ => false,
        }
    }

    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let value = match &self.kind {
            ExprKind::Num(v) => *v,
            ExprKind::Var => x,
            ExprKind::Neg(e) => -e.eval(x)?,
            ExprKind::Binary(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero {
                                offset: self.offset,
                            });
                        }
                        a / b
                    }
                }
            }
            ExprKind::Pow(base, k) => base.eval(x)?.powi(*k as i32),
            ExprKind::Call(f, arg) => f.apply(arg.eval(x)?),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::Overflow {
                offset: self.offset,
            })
        }
    }

    fn fmt_prec(&self, out: &mut fmt::Formatter<'_>, var: char, parent: u8) -> fmt::Result {
        // Precedence levels: 1 additive, 2 multiplicative, 3 unary, 4 power, 5 atom.
        match &self.kind {
            ExprKind::Num(v) => write!(out, "{v:?}"),
            ExprKind::Var => write!(out, "{var}"),
            ExprKind::Neg(e) => {
                let wrap = parent > 3;
                if wrap {
                    write!(out, "(")?;
                }
                write!(out, "-")?;
                e.fmt_prec(out, var, 3)?;
                if wrap {
                    write!(out, ")")?;
                }
                Ok(())
            }
            ExprKind::Binary(op, l, r) => {
                let p = op.precedence();
                let wrap = parent > p;
                if wrap {
                    write!(out, "(")?;
                }
                l.fmt_prec(out, var, p)?;
                write!(out, " {} ", op.symbol())?;
                // Left-associative: the right operand needs one level more.
                r.fmt_prec(out, var, p + 1)?;
                if wrap {
                    write!(out, ")")?;
                }
                Ok(())
            }
            ExprKind::Pow(base, k) => {
                let wrap = parent > 4;
                if wrap {
                    write!(out, "(")?;
                }
                base.fmt_prec(out, var, 5)?;
                write!(out, "^{k}")?;
                if wrap {
                    write!(out, ")")?;
                }
                Ok(())
            }
            ExprKind::Call(f, arg) => {
                write!(out, "{}(", f.name())?;
                arg.fmt_prec(out, var, 0)?;
                write!(out, ")")
            }
        }
    }
}

/// A parsed scalar function of one variable. Cheap to clone and shareable
/// across threads.
#[derive(Debug, Clone)]
pub struct ExpressionFn {
    source: Arc<str>,
    root: Arc<Expr>,
    var: char,
    constant: bool,
}

impl ExpressionFn {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut parser = Parser::new(src);
        let root = parser.parse_all()?;
        Ok(Self {
            source: Arc::from(src),
            root: Arc::new(root),
            var: parser.var.unwrap_or('u'),
            constant: parser.var.is_none(),
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        if !x.is_finite() {
            return Err(EvalError::NonFiniteArgument { x });
        }
        self.root.eval(x)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// The free variable (`u` or `t`). Constant expressions report `u`.
    pub fn variable(&self) -> char {
        self.var
    }

    /// True when the expression mentions no variable.
    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// Canonical, fully explicit rendering that reparses to the same tree.
    pub fn pretty(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ExpressionFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt_prec(f, self.var, 0)
    }
}

impl std::str::FromStr for ExpressionFn {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
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
            Tok::Ident(s) => format!("identifier '{s}'"),
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

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
    var: Option<char>,
}

const OPERAND: &[&str] = &["number", "'u' or 't'", "'exp'", "'('", "'-'"];

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
            var: None,
        }
    }

    fn error(&self, offset: usize, expected: &[&str], message: impl Into<String>) -> ParseError {
        ParseError {
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: message.into(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error(
            self.tok_start,
            expected,
            format!("unexpected {}", self.tok.describe()),
        )
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            self.tok = tok;
            return Ok(());
        }
        if c.is_ascii_digit() || c == b'.' {
            self.tok = Tok::Num(self.lex_number()?);
            return Ok(());
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
            return Ok(());
        }
        let ch = self.src[self.pos..].chars().next().unwrap_or('?');
        Err(self.error(self.pos, OPERAND, format!("invalid character '{ch}'")))
    }

    fn lex_number(&mut self) -> Result<f64, ParseError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - s
        };
        let mut p = self.pos;
        let mut count = digits(&mut p);
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            count += digits(&mut p);
        }
        if count == 0 {
            return Err(self.error(start, &["digit"], "malformed number"));
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) == 0 {
                return Err(self.error(q, &["digit"], "malformed exponent in number"));
            }
            p = q;
        }
        self.pos = p;
        self.src[start..p]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.error(start, &["number"], "malformed or out-of-range number"))
    }

    fn parse_all(&mut self) -> Result<Expr, ParseError> {
        self.advance()?;
        if self.tok == Tok::End {
            return Err(self.error(0, OPERAND, "empty expression"));
        }
        let e = self.expr()?;
        if self.tok != Tok::End {
            return Err(self.unexpected(&["operator", "end of input"]));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let at = self.tok_start;
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), at);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                // Reject implicit multiplication such as `2u` or `2(u)`.
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen => {
                    return Err(self.unexpected(&["operator", "end of input"]))
                }
                _ => return Ok(lhs),
            };
            let at = self.tok_start;
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), at);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            let at = self.tok_start;
            self.advance()?;
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), at));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        let at = self.tok_start;
        self.advance()?;
        let k = self.exponent()?;
        Ok(Expr::new(ExprKind::Pow(Box::new(base), k), at))
    }

    /// Right-associative chain of integer literals, folded to one exponent.
    fn exponent(&mut self) -> Result<u32, ParseError> {
        let at = self.tok_start;
        let Tok::Num(v) = self.tok else {
            return Err(self.error(
                at,
                &["nonnegative integer"],
                format!("unexpected {} in exponent", self.tok.describe()),
            ));
        };
        if v.fract() != 0.0 || !(0.0..=i32::MAX as f64).contains(&v) {
            return Err(self.error(
                at,
                &["nonnegative integer"],
                "exponent must be a nonnegative integer",
            ));
        }
        self.advance()?;
        let mut k = v as u32;
        if self.tok == Tok::Caret {
            self.advance()?;
            let e = self.exponent()?;
            k = k
                .checked_pow(e)
                .filter(|k| *k <= i32::MAX as u32)
                .ok_or_else(|| self.error(at, &["smaller exponent"], "exponent overflow"))?;
        }
        Ok(k)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.tok_start;
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::new(ExprKind::Num(v), at))
            }
            Tok::Ident(name) => {
                if let Some(f) = Builtin::from_name(&name) {
                    self.advance()?;
                    if self.tok != Tok::LParen {
                        return Err(self.unexpected(&["'('"]));
                    }
                    self.advance()?;
                    let arg = self.expr()?;
                    if self.tok != Tok::RParen {
                        return Err(self.unexpected(&["')'", "operator"]));
                    }
                    self.advance()?;
                    return Ok(Expr::new(ExprKind::Call(f, Box::new(arg)), at));
                }
                let var = match name.as_str() {
                    "u" => 'u',
                    "t" => 't',
                    _ => {
                        return Err(self.error(
                            at,
                            &["'u'", "'t'", "'exp'"],
                            format!("unknown identifier '{name}'"),
                        ))
                    }
                };
                match self.var {
                    Some(prev) if prev != var => {
                        return Err(self.error(
                            at,
                            &[if prev == 'u' { "'u'" } else { "'t'" }],
                            format!("expression mixes variables '{prev}' and '{var}'"),
                        ))
                    }
                    _ => self.var = Some(var),
                }
                self.advance()?;
                Ok(Expr::new(ExprKind::Var, at))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(self.unexpected(&["')'", "operator"]));
                }
                self.advance()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(OPERAND)),
        }
    }
}
