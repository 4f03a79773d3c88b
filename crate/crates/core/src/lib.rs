//! Numerical toolkit for singular two-point problems driven by a Hadamard
//! fractional derivative of order between 2 and 3:
//!
//! ```text
//! HD^μ x(t) + f(t, x(t)) = 0,   t ∈ (a, b),   2 < μ < 3,
//! x(a) = a·x'(a) = x(b) = 0,
//! ```
//!
//! with `f` positive and allowed to blow up at `t = a`, `t = b` and `x = 0`.
//!
//! The crate is organized bottom-up:
//!
//! - [`quadrature`]: tanh-sinh integration in log-coordinates, the workhorse
//!   under every singular integral.
//! - [`frac`]: intervals, orders, and the Hadamard integral and derivative.
//! - [`greens`]: the Green's function of the linear problem, its envelope
//!   functions `u, v, w`, and numerical certification of the envelope bounds.
//! - [`expr`]: the expression language used to write `f(t, x)` in problem
//!   files.
//! - [`conditions`]: sampled checks of the admissibility hypotheses and the
//!   choice of the radius `R`, the margin `ε` and the first regularization
//!   index `n₀`.
//! - [`solver`]: fixed points of the regularized operators `T_n`, continuation
//!   in `n`, cone/envelope checks and residual verification.
//! - [`cli`]: problem files, report formatting and the subcommands behind the
//!   `hbvp` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditions;
pub mod error;
pub mod expr;
pub mod frac;
pub mod greens;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use frac::{Interval, LogCoord, Order};
pub use quadrature::{QuadratureConfig, QuadratureResult};
