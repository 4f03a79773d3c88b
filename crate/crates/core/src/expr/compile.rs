use std::collections::BTreeMap;

use super::{BinaryOp, EvalError, ExprAst, UnaryOp, Var};
use crate::frac::{Interval, LogCoord};

/// Evaluation tree with parameters substituted.
///
/// Logarithms that are exactly `ln(t/a)` or `ln(b/t)` for the problem
/// interval (including `ln(t)` when `a = 1`) are replaced by the quadrature's
/// log-coordinates, which stay accurate right up to the endpoints where the
/// nonlinearity is singular.
#[derive(Debug, Clone, PartialEq)]
enum Code {
    Const(f64),
    T,
    X,
    /// `ln(t/a)`
    S,
    /// `ln(b/t)`
    Sc,
    Unary(UnaryOp, Box<Code>),
    Binary(BinaryOp, Box<Code>, Box<Code>),
}

impl Code {
    fn eval(&self, c: &LogCoord, x: f64) -> f64 {
        match self {
            Self::Const(v) => *v,
            Self::T => c.t,
            Self::X => x,
            Self::S => c.s,
            Self::Sc => c.sc,
            Self::Unary(op, e) => op.apply(e.eval(c, x)),
            Self::Binary(op, l, r) => op.apply(l.eval(c, x), r.eval(c, x)),
        }
    }
}

/// A nonlinearity `f(t, x)`: parsed expression, bound parameters and the
/// interval it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    source: ExprAst,
    params: BTreeMap<String, f64>,
    interval: Interval,
    code: Code,
}

impl Nonlinearity {
    pub fn new(source: ExprAst, params: BTreeMap<String, f64>, interval: Interval) -> Result<Self, EvalError> {
        let code = compile(&source, &params, &interval)?;
        Ok(Self {
            source,
            params,
            interval,
            code,
        })
    }

    pub fn source(&self) -> &ExprAst {
        &self.source
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    /// Raw IEEE value at a log-coordinate; NaN is passed through.
    #[inline]
    pub fn value_at(&self, c: &LogCoord, x: f64) -> f64 {
        self.code.eval(c, x)
    }

    pub fn eval_at(&self, c: &LogCoord, x: f64) -> Result<f64, EvalError> {
        let v = self.value_at(c, x);
        if v.is_nan() {
            return Err(EvalError::NotANumber { t: c.t, x });
        }
        Ok(v)
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        let c = LogCoord {
            t,
            s: (t / self.interval.a()).ln(),
            sc: (self.interval.b() / t).ln(),
        };
        self.eval_at(&c, x)
    }

    /// Same expression with parameter `name` rebound.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, EvalError> {
        let mut params = self.params.clone();
        params.insert(name.to_string(), value);
        Self::new(self.source.clone(), params, self.interval)
    }

    /// Splits `f = λ·g` for the parameter `name`. Returns the bound value of
    /// `λ` and `g`, or `None` when `name` does not enter as a single factor.
    pub fn factor_out(&self, name: &str) -> Option<(f64, Self)> {
        let lambda = *self.params.get(name)?;
        let g = self.source.factor_out(name)?;
        let mut params = self.params.clone();
        params.remove(name);
        Some((lambda, Self::new(g, params, self.interval).ok()?))
    }
}

fn compile(e: &ExprAst, params: &BTreeMap<String, f64>, iv: &Interval) -> Result<Code, EvalError> {
    Ok(match e {
        ExprAst::Const(v) => Code::Const(*v),
        ExprAst::Var(Var::T) => Code::T,
        ExprAst::Var(Var::X) => Code::X,
        ExprAst::Param(p) => Code::Const(*params.get(p).ok_or_else(|| EvalError::Unbound(p.clone()))?),
        ExprAst::Unary(UnaryOp::Ln, arg) => {
            let inner = compile(arg, params, iv)?;
            log_rewrite(&inner, iv).unwrap_or_else(|| Code::Unary(UnaryOp::Ln, Box::new(inner)))
        }
        ExprAst::Unary(op, arg) => Code::Unary(*op, Box::new(compile(arg, params, iv)?)),
        ExprAst::Binary(op, l, r) => {
            let l = compile(l, params, iv)?;
            let r = compile(r, params, iv)?;
            match (&l, &r) {
                (Code::Const(a), Code::Const(b)) => Code::Const(op.apply(*a, *b)),
                _ => Code::Binary(*op, Box::new(l), Box::new(r)),
            }
        }
    })
}

fn neg(c: Code) -> Code {
    Code::Unary(UnaryOp::Neg, Box::new(c))
}

/// Exact identities only: the endpoint constant must equal `a` or `b` bit
/// for bit.
fn log_rewrite(arg: &Code, iv: &Interval) -> Option<Code> {
    let (a, b) = (iv.a(), iv.b());
    match arg {
        Code::T if a == 1.0 => Some(Code::S),
        Code::T if b == 1.0 => Some(neg(Code::Sc)),
        Code::Binary(BinaryOp::Div, num, den) => match (&**num, &**den) {
            (Code::T, Code::Const(c)) if *c == a => Some(Code::S),
            (Code::T, Code::Const(c)) if *c == b => Some(neg(Code::Sc)),
            (Code::Const(c), Code::T) if *c == b => Some(Code::Sc),
            (Code::Const(c), Code::T) if *c == a => Some(neg(Code::S)),
            _ => None,
        },
        _ => None,
    }
}
