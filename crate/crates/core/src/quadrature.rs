//! Double-exponential (tanh-sinh) quadrature for endpoint-singular integrands.
//!
//! Every integral in this crate is taken over `[a, b]` against `dτ/τ`, which in
//! the log-coordinate `s = ln(τ/a)` becomes plain `ds` over `[0, L]`. The core
//! routine [`tanh_sinh`] therefore integrates over `[0, len]` and hands the
//! integrand *both* distances to the endpoints, each computed without
//! cancellation. Kernels of the form `s^α (L - s)^β` can then be evaluated to
//! full relative precision arbitrarily close to either end.
//!
//! Nodes are never placed on the endpoints themselves.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use thiserror::Error;

use crate::frac::{Interval, LogCoord};

/// Deepest refinement level with a precomputed node table.
pub const MAX_LEVEL: usize = 20;

/// Nodes whose normalized endpoint distance falls below this are dropped.
const DELTA_MIN: f64 = 1e-300;

/// Non-finite samples closer to an endpoint than `TAIL_REGION * len` truncate
/// the rule on that side instead of failing.
const TAIL_REGION: f64 = 1e-8;

/// Refinement must reach at least this level before the estimate is trusted.
const MIN_LEVEL: usize = 3;

const MAX_RESTARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_levels: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig("rel_tol must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig("abs_tol must be positive"));
        }
        if self.max_levels < 1 || self.max_levels > MAX_LEVEL {
            return Err(QuadratureError::InvalidConfig("max_levels must lie in 1..=20"));
        }
        Ok(())
    }

    /// Same config with the relative tolerance loosened to at least `rel_tol`.
    pub fn with_rel_tol_at_least(mut self, rel_tol: f64) -> Self {
        self.rel_tol = self.rel_tol.max(rel_tol);
        self
    }

    fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub levels_used: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// The value, or an error when refinement did not converge.
    pub fn require_converged(self) -> Result<f64, QuadratureError> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(QuadratureError::NotConverged {
                value: self.value,
                error_estimate: self.error_estimate,
                levels: self.levels_used,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand returned {value} at interior abscissa {position} (distance to nearest end {gap:e})")]
    NonFinite { position: f64, gap: f64, value: f64 },
    #[error("quadrature did not converge after {levels} levels: value {value}, error estimate {error_estimate:e}")]
    NotConverged {
        value: f64,
        error_estimate: f64,
        levels: usize,
    },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("integration length must be finite and non-negative, got {0}")]
    BadLength(f64),
}

/// One abscissa on the positive half of the tanh-sinh axis, normalized to
/// an interval of unit length.
#[derive(Debug, Clone, Copy)]
struct Node {
    /// Distance from the nearer endpoint.
    near: f64,
    /// Distance from the farther endpoint (`1 - near`, computed directly).
    far: f64,
    weight: f64,
}

fn node_at(t: f64) -> Node {
    let u = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * u).exp();
    let one_plus = 1.0 + e;
    Node {
        near: e / one_plus,
        far: 1.0 / one_plus,
        weight: FRAC_PI_2 * 0.5 * t.cosh() * 4.0 * e / (one_plus * one_plus),
    }
}

/// Nodes first introduced at `level`: `t = j` at level 0 (excluding the
/// origin), odd multiples of `2^-level` afterwards.
fn level_nodes(level: usize) -> &'static [Node] {
    static TABLES: [OnceLock<Vec<Node>>; MAX_LEVEL + 1] = [const { OnceLock::new() }; MAX_LEVEL + 1];
    TABLES[level].get_or_init(|| {
        let h = 0.5f64.powi(level as i32);
        let (start, step) = if level == 0 { (1.0, 1.0) } else { (h, 2.0 * h) };
        let mut nodes = Vec::new();
        let mut k = 0usize;
        loop {
            let t = start + step * k as f64;
            let node = node_at(t);
            if node.near < DELTA_MIN || node.weight == 0.0 {
                break;
            }
            nodes.push(node);
            k += 1;
        }
        nodes
    })
}

/// Integrand samples at one level, accumulated with the truncation state.
struct Rule {
    len: f64,
    /// Nodes with `near <= cut` are skipped on that side.
    cut_left: f64,
    cut_right: f64,
}

enum Sample {
    Value(f64),
    Truncate { left: bool, near: f64 },
}

struct LevelSum {
    sum: f64,
    /// |weight * g| at the outermost retained abscissa on each side.
    tail: f64,
}

impl Rule {
    fn eval<F: FnMut(f64, f64) -> f64>(
        &self,
        g: &mut F,
        from_left: f64,
        from_right: f64,
        near: f64,
        left: bool,
    ) -> Result<Sample, QuadratureError> {
        let value = g(from_left, from_right);
        if value.is_finite() {
            return Ok(Sample::Value(value));
        }
        if near <= TAIL_REGION {
            return Ok(Sample::Truncate { left, near });
        }
        Err(QuadratureError::NonFinite {
            position: from_left,
            gap: from_left.min(from_right),
            value,
        })
    }

    /// Weighted sum (without the step factor) over nodes new at `level`.
    fn level<F: FnMut(f64, f64) -> f64>(
        &self,
        g: &mut F,
        level: usize,
    ) -> Result<Result<LevelSum, Sample>, QuadratureError> {
        let len = self.len;
        let mut sum = 0.0;
        let mut tail_l = 0.0;
        let mut tail_r = 0.0;
        if level == 0 {
            let half = 0.5 * len;
            match self.eval(g, half, half, 0.5, true)? {
                Sample::Value(v) => sum += FRAC_PI_2 * 0.5 * v,
                other => return Ok(Err(other)),
            }
        }
        for node in level_nodes(level) {
            if node.near > self.cut_left {
                let p = len * node.near;
                let q = len * node.far;
                match self.eval(g, p, q, node.near, true)? {
                    Sample::Value(v) => {
                        let c = node.weight * v;
                        sum += c;
                        tail_l = c.abs();
                    }
                    other => return Ok(Err(other)),
                }
            }
            if node.near > self.cut_right {
                let p = len * node.far;
                let q = len * node.near;
                match self.eval(g, p, q, node.near, false)? {
                    Sample::Value(v) => {
                        let c = node.weight * v;
                        sum += c;
                        tail_r = c.abs();
                    }
                    other => return Ok(Err(other)),
                }
            }
        }
        Ok(Ok(LevelSum {
            sum,
            tail: (tail_l + tail_r) * len,
        }))
    }

    fn truncate(&mut self, sample: Sample) {
        if let Sample::Truncate { left, near } = sample {
            if left {
                self.cut_left = self.cut_left.max(near);
            } else {
                self.cut_right = self.cut_right.max(near);
            }
        }
    }
}

/// Integrates `g` over `[0, len]`.
///
/// `g(p, q)` receives the distance `p` from the left end and `q` from the
/// right end of the abscissa (`p + q = len` up to rounding, but each is exact
/// on its own).
///
/// A NaN or infinite sample in the interior is a hard error. Near an endpoint
/// (closer than `1e-8 * len`) it is taken as the floating-point range running
/// out: the rule is truncated on that side and the magnitude of the last
/// retained sample enters the error estimate, so a non-integrable singularity
/// shows up as `converged == false`.
pub fn tanh_sinh<F>(len: f64, mut g: F, cfg: &QuadratureConfig) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64, f64) -> f64,
{
    cfg.validate()?;
    if !(len >= 0.0 && len.is_finite()) {
        return Err(QuadratureError::BadLength(len));
    }
    if len == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            levels_used: 0,
            converged: true,
        });
    }
    let mut rule = Rule {
        len,
        cut_left: 0.0,
        cut_right: 0.0,
    };
    'restart: for _ in 0..MAX_RESTARTS {
        let mut raw = 0.0;
        let mut prev = f64::NAN;
        let mut best = None;
        for level in 0..=cfg.max_levels {
            let part = match rule.level(&mut g, level)? {
                Ok(part) => part,
                Err(sample) => {
                    rule.truncate(sample);
                    continue 'restart;
                }
            };
            raw += part.sum;
            let h = 0.5f64.powi(level as i32);
            let value = len * h * raw;
            let diff = (value - prev).abs();
            let estimate = if level == 0 { f64::INFINITY } else { diff.max(part.tail) };
            let result = QuadratureResult {
                value,
                error_estimate: estimate,
                levels_used: level,
                converged: false,
            };
            best = Some(result);
            if level >= MIN_LEVEL && estimate <= cfg.tolerance(value) {
                return Ok(QuadratureResult {
                    converged: true,
                    ..result
                });
            }
            prev = value;
        }
        return Ok(best.expect("at least level 0 evaluated"));
    }
    Err(QuadratureError::NonFinite {
        position: f64::NAN,
        gap: 0.0,
        value: f64::NAN,
    })
}

/// Tanh-sinh sum at a fixed refinement level with no adaptivity.
///
/// The result is a smooth function of any parameter the integrand depends on
/// smoothly, which is what finite differencing of a quadrature needs.
pub fn tanh_sinh_fixed<F>(len: f64, mut g: F, level: usize) -> Result<f64, QuadratureError>
where
    F: FnMut(f64, f64) -> f64,
{
    if level > MAX_LEVEL {
        return Err(QuadratureError::InvalidConfig("level exceeds table depth"));
    }
    if !(len >= 0.0 && len.is_finite()) {
        return Err(QuadratureError::BadLength(len));
    }
    if len == 0.0 {
        return Ok(0.0);
    }
    let mut rule = Rule {
        len,
        cut_left: 0.0,
        cut_right: 0.0,
    };
    'restart: for _ in 0..MAX_RESTARTS {
        let mut raw = 0.0;
        for l in 0..=level {
            match rule.level(&mut g, l)? {
                Ok(part) => raw += part.sum,
                Err(sample) => {
                    rule.truncate(sample);
                    continue 'restart;
                }
            }
        }
        return Ok(len * 0.5f64.powi(level as i32) * raw);
    }
    Err(QuadratureError::NonFinite {
        position: f64::NAN,
        gap: 0.0,
        value: f64::NAN,
    })
}

/// `∫_a^b g(τ) dτ/τ` for an integrand given in log-coordinates.
pub fn integrate_log_coords<F>(
    interval: &Interval,
    mut g: F,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(LogCoord) -> f64,
{
    tanh_sinh(interval.log_len(), |s, sc| g(interval.coord_from_parts(s, sc)), cfg)
}

/// `∫_a^b g(τ) dτ/τ`.
pub fn integrate_log_measure<F>(
    g: F,
    interval: &Interval,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_log_coords(interval, |c| g(c.t), cfg)
}

/// `∫_a^b g(t) dt`, evaluated as `∫ g(τ)·τ dτ/τ`.
pub fn integrate_plain<F>(
    g: F,
    interval: &Interval,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_log_coords(interval, |c| g(c.t) * c.t, cfg)
}

/// `∫_a^b g(t) dt` for an integrand given in log-coordinates.
pub fn integrate_plain_coords<F>(
    interval: &Interval,
    mut g: F,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(LogCoord) -> f64,
{
    integrate_log_coords(interval, |c| g(c) * c.t, cfg)
}
