//! A small arithmetic expression language.
//!
//! Grammar (`^` is right-associative, unary minus binds tighter than `^`):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := unary ("^" factor)?
//! unary  := "-" unary | atom
//! atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Functions are `abs`, `sqrt` (one argument) and `min`, `max` (two or more).
//! Variables are `x`, `y`, `u` and `v`. Numbers are decimal with an optional
//! exponent and are evaluated in double precision.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("expression is empty")]
    Empty,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("function `{name}` at offset {offset} takes {expected} argument(s), got {found}")]
    Arity {
        name: &'static str,
        expected: &'static str,
        found: usize,
        offset: usize,
    },
    #[error("variable `{name}` is not available here (allowed: {allowed})")]
    VariableNotAllowed { name: char, allowed: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    U,
    V,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X, Var::Y, Var::U, Var::V];

    pub fn name(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::U => 'u',
            Var::V => 'v',
        }
    }

    fn slot(self) -> usize {
        self as usize
    }

    fn from_ident(s: &str) -> Option<Var> {
        match s {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "u" => Some(Var::U),
            "v" => Some(Var::V),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Min,
    Max,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn from_ident(s: &str) -> Option<Func> {
        match s {
            "abs" => Some(Func::Abs),
            "sqrt" => Some(Func::Sqrt),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

const ATOM_PREC: u8 = 5;
const NEG_PREC: u8 = 4;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Num(_) | Node::Var(_) | Node::Call(..) => ATOM_PREC,
            Node::Neg(_) => NEG_PREC,
            Node::Binary(op, ..) => op.precedence(),
        }
    }

    pub fn eval(&self, vars: &Bindings) -> f64 {
        match self {
            Node::Num(n) => *n,
            Node::Var(v) => vars.get(*v),
            Node::Neg(inner) => -inner.eval(vars),
            Node::Binary(op, l, r) => {
                let (a, b) = (l.eval(vars), r.eval(vars));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => libm::pow(a, b),
                }
            }
            Node::Call(func, args) => match func {
                Func::Abs => libm::fabs(args[0].eval(vars)),
                Func::Sqrt => libm::sqrt(args[0].eval(vars)),
                Func::Min => args
                    .iter()
                    .map(|a| a.eval(vars))
                    .fold(
                        f64::INFINITY,
                        |m, x| if x < m || x.is_nan() { x } else { m },
                    ),
                Func::Max => args
                    .iter()
                    .map(|a| a.eval(vars))
                    .fold(
                        f64::NEG_INFINITY,
                        |m, x| if x > m || x.is_nan() { x } else { m },
                    ),
            },
        }
    }

    fn collect_vars(&self, out: &mut [bool; 4]) {
        match self {
            Node::Num(_) => {}
            Node::Var(v) => out[v.slot()] = true,
            Node::Neg(inner) => inner.collect_vars(out),
            Node::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Node::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self)
        } else {
            write!(f, "{}", self)
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(n) => write!(f, "{}", n),
            Node::Var(v) => write!(f, "{}", v.name()),
            Node::Neg(inner) => {
                f.write_str("-")?;
                inner.write_child(f, inner.precedence() < NEG_PREC)
            }
            Node::Binary(op, l, r) => {
                let p = op.precedence();
                let (lp, rp) = if *op == BinOp::Pow {
                    // `-a ^ b` parses as `(-a) ^ b`, so only binary children need parens.
                    (l.precedence() <= p, r.precedence() < p)
                } else {
                    (l.precedence() < p, r.precedence() <= p)
                };
                l.write_child(f, lp)?;
                write!(f, " {} ", op.symbol())?;
                r.write_child(f, rp)
            }
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Variable values for evaluation. Unbound variables evaluate to NaN.
#[derive(Debug, Clone, Copy)]
pub struct Bindings([f64; 4]);

impl Default for Bindings {
    fn default() -> Self {
        Bindings([f64::NAN; 4])
    }
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        self.0[var.slot()] = value;
        self
    }

    pub fn get(&self, var: Var) -> f64 {
        self.0[var.slot()]
    }
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    root: Node,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let root = Parser::new(text)?.parse()?;
        Ok(Expr {
            source: text.to_string(),
            root,
        })
    }

    /// Parses `text` and rejects variables outside `allowed`.
    pub fn parse_with(text: &str, allowed: &[Var]) -> Result<Expr, ExprError> {
        let expr = Self::parse(text)?;
        if let Some(bad) = expr.free_vars().into_iter().find(|v| !allowed.contains(v)) {
            let allowed = allowed
                .iter()
                .map(|v| v.name().to_string())
                .collect::<Vec<_>>()
                .join(", ");
            return Err(ExprError::VariableNotAllowed {
                name: bad.name(),
                allowed,
            });
        }
        Ok(expr)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn free_vars(&self) -> Vec<Var> {
        let mut seen = [false; 4];
        self.root.collect_vars(&mut seen);
        Var::ALL.into_iter().filter(|v| seen[v.slot()]).collect()
    }

    pub fn eval(&self, vars: &Bindings) -> f64 {
        self.root.eval(vars)
    }

    pub fn eval_uv(&self, u: f64, v: f64) -> f64 {
        self.eval(&Bindings::new().with(Var::U, u).with(Var::V, v))
    }

    pub fn eval_xy(&self, x: f64, y: f64) -> f64 {
        self.eval(&Bindings::new().with(Var::X, x).with(Var::Y, y))
    }

    pub fn eval_x(&self, x: f64) -> f64 {
        self.eval(&Bindings::new().with(Var::X, x))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
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
    Comma,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn syntax(offset: usize, message: &str) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
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
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| syntax(start, "malformed number"))?;
                if !value.is_finite() {
                    return Err(syntax(start, "number out of range"));
                }
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => return Err(syntax(start, "unexpected character")),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

impl Parser {
    fn new(text: &str) -> Result<Self, ExprError> {
        if text.trim().is_empty() {
            return Err(ExprError::Empty);
        }
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn parse(mut self) -> Result<Node, ExprError> {
        let node = self.expr()?;
        match self.peek() {
            Tok::End => Ok(node),
            Tok::RParen => Err(syntax(self.offset(), "unbalanced `)`")),
            _ => Err(syntax(self.offset(), "expected operator")),
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ExprError> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.factor()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(n) => Ok(Node::Num(n)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let func = Func::from_ident(&name)
                        .ok_or(ExprError::UnknownFunction { name, offset })?;
                    self.bump();
                    let mut args = Vec::from([self.expr()?]);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect_rparen()?;
                    let ok = match func {
                        Func::Abs | Func::Sqrt => args.len() == 1,
                        Func::Min | Func::Max => args.len() >= 2,
                    };
                    if !ok {
                        return Err(ExprError::Arity {
                            name: func.name(),
                            expected: match func {
                                Func::Abs | Func::Sqrt => "1",
                                _ => "at least 2",
                            },
                            found: args.len(),
                            offset,
                        });
                    }
                    Ok(Node::Call(func, args))
                } else {
                    Var::from_ident(&name)
                        .map(Node::Var)
                        .ok_or(ExprError::UnknownVariable { name, offset })
                }
            }
            Tok::End => Err(syntax(offset, "unexpected end of expression")),
            _ => Err(syntax(offset, "expected operand")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), "expected `)`"))
        }
    }
}
