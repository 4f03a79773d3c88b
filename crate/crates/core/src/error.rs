use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::quadrature::QuadratureError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("quadrature failed at node {node} (s = {s}): {source}")]
    NodeQuadrature {
        node: usize,
        s: f64,
        source: QuadratureError,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unsupported expression structure: {0}")]
    Unsupported(String),
    #[error("fixed-point iteration for n = {n} did not converge in {iterations} iterations (residual {residual:e}, bracket width {bracket_width:e})")]
    NonConvergence {
        n: String,
        iterations: usize,
        residual: f64,
        bracket_width: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }
}
