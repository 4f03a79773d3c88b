//! A small expression language for nonlinearities `f(t, x)`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := ln | exp | sqrt | abs
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2` is
//! `-(x^2)` and `2^-x^2` is `2^(-(x^2))`. The variables are `t` and `x`; every
//! other identifier is a parameter bound at evaluation time. There are no
//! builtin constants (write `exp(1)` for `e`).
//!
//! Evaluation follows IEEE-754: division by zero gives `±∞`, which is not an
//! error. A NaN result is.

mod compile;
mod parser;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use compile::Nonlinearity;
pub use parser::{parse, parse_with_params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Ln,
    Exp,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Parsed expression tree.
///
/// Constants produced by the parser are finite and non-negative; only such
/// trees are guaranteed to print back to an identical tree.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(f64),
    Var(Var),
    Param(String),
    Unary(UnaryOp, Box<ExprAst>),
    Binary(BinaryOp, Box<ExprAst>, Box<ExprAst>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            Self::Syntax { position, .. }
            | Self::UnknownIdentifier { position, .. }
            | Self::UnknownFunction { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("parameter `{0}` is not bound")]
    Unbound(String),
    #[error("expression evaluated to NaN at t = {t}, x = {x}")]
    NotANumber { t: f64, x: f64 },
}

impl UnaryOp {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Self::Neg => -v,
            Self::Ln => v.ln(),
            Self::Exp => v.exp(),
            Self::Sqrt => v.sqrt(),
            Self::Abs => v.abs(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Neg => "-",
            Self::Ln => "ln",
            Self::Exp => "exp",
            Self::Sqrt => "sqrt",
            Self::Abs => "abs",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "ln" => Self::Ln,
            "exp" => Self::Exp,
            "sqrt" => Self::Sqrt,
            "abs" => Self::Abs,
            _ => return None,
        })
    }
}

impl BinaryOp {
    pub fn apply(self, l: f64, r: f64) -> f64 {
        match self {
            Self::Add => l + r,
            Self::Sub => l - r,
            Self::Mul => l * r,
            Self::Div => l / r,
            Self::Pow => l.powf(r),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Self::Add => "+",
            Self::Sub => "-",
            Self::Mul => "*",
            Self::Div => "/",
            Self::Pow => "^",
        }
    }
}

impl ExprAst {
    pub fn constant(v: f64) -> Self {
        Self::Const(v)
    }

    pub fn var(v: Var) -> Self {
        Self::Var(v)
    }

    pub fn param(name: impl Into<String>) -> Self {
        Self::Param(name.into())
    }

    pub fn unary(op: UnaryOp, e: ExprAst) -> Self {
        Self::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: ExprAst, r: ExprAst) -> Self {
        Self::Binary(op, Box::new(l), Box::new(r))
    }

    /// Names of all parameters (identifiers other than `t` and `x`).
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Self::Param(p) => {
                out.insert(p.clone());
            }
            Self::Unary(_, e) => e.collect_params(out),
            Self::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
            Self::Const(_) | Self::Var(_) => {}
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Self::Param(p) => p == name,
            Self::Unary(_, e) => e.mentions(name),
            Self::Binary(_, l, r) => l.mentions(name) || r.mentions(name),
            Self::Const(_) | Self::Var(_) => false,
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Self::Var(v) => *v == var,
            Self::Unary(_, e) => e.depends_on(var),
            Self::Binary(_, l, r) => l.depends_on(var) || r.depends_on(var),
            Self::Const(_) | Self::Param(_) => false,
        }
    }

    /// Evaluates at `(t, x)` with parameters looked up in `params`.
    pub fn eval(&self, t: f64, x: f64, params: &HashMap<String, f64>) -> Result<f64, EvalError> {
        let v = self.eval_inner(t, x, params)?;
        if v.is_nan() {
            return Err(EvalError::NotANumber { t, x });
        }
        Ok(v)
    }

    fn eval_inner(&self, t: f64, x: f64, params: &HashMap<String, f64>) -> Result<f64, EvalError> {
        Ok(match self {
            Self::Const(c) => *c,
            Self::Var(Var::T) => t,
            Self::Var(Var::X) => x,
            Self::Param(p) => *params.get(p).ok_or_else(|| EvalError::Unbound(p.clone()))?,
            Self::Unary(op, e) => op.apply(e.eval_inner(t, x, params)?),
            Self::Binary(op, l, r) => op.apply(l.eval_inner(t, x, params)?, r.eval_inner(t, x, params)?),
        })
    }

    /// Checks that `name` enters as a single multiplicative factor, i.e. the
    /// expression is `name · g` with `g` free of `name`, and returns `g`.
    pub fn factor_out(&self, name: &str) -> Option<ExprAst> {
        match self {
            Self::Param(p) if p == name => Some(Self::Const(1.0)),
            Self::Unary(UnaryOp::Neg, e) => Some(Self::unary(UnaryOp::Neg, e.factor_out(name)?)),
            Self::Binary(BinaryOp::Mul, l, r) => match (l.mentions(name), r.mentions(name)) {
                (true, false) => Some(Self::binary(BinaryOp::Mul, l.factor_out(name)?, (**r).clone())),
                (false, true) => Some(Self::binary(BinaryOp::Mul, (**l).clone(), r.factor_out(name)?)),
                _ => None,
            },
            Self::Binary(BinaryOp::Div, l, r) if !r.mentions(name) => {
                Some(Self::binary(BinaryOp::Div, l.factor_out(name)?, (**r).clone()))
            }
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Self::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Self::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Self::Unary(UnaryOp::Neg, _) => 3,
            Self::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &ExprAst, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(c) => write!(f, "{c:?}"),
            Self::Var(Var::T) => f.write_str("t"),
            Self::Var(Var::X) => f.write_str("x"),
            Self::Param(p) => f.write_str(p),
            Self::Unary(UnaryOp::Neg, e) => {
                f.write_str("-")?;
                write_child(f, e, e.precedence() < 3)
            }
            Self::Unary(op, e) => write!(f, "{}({e})", op.name()),
            Self::Binary(BinaryOp::Pow, l, r) => {
                write_child(f, l, l.precedence() <= 4)?;
                f.write_str("^")?;
                write_child(f, r, r.precedence() < 3)
            }
            Self::Binary(op, l, r) => {
                let p = self.precedence();
                write_child(f, l, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, r, r.precedence() <= p)
            }
        }
    }
}
