//! Positive solutions by fixed-point iteration on the regularized operators
//!
//! ```text
//! (T_n x)(t) = ∫_a^b G(t, τ) f(τ, |x(τ)| + 1/n) dτ/τ,
//! ```
//!
//! continued along an increasing sequence of `n` and finished with the
//! unregularized operator (`1/n = 0`). Every accepted solution is checked
//! against the a priori envelope `r·w(t) ≤ x(t) ≤ R − ε`, the cone condition
//! `x(t) ≥ w(t)‖x‖`, and the differential equation itself.

mod grid;

use std::fmt;

use rayon::prelude::*;

pub use grid::{zone_coords, SolutionGrid, CSV_HEADER, GRADING, ZONE_BOTTOM, ZONE_POINTS, ZONE_TOP};

use crate::conditions::{ConditionReport, Problem};
use crate::error::{Error, Result};
use crate::frac::{hadamard_derivative_log, LogCoord};
use crate::greens::GreensParams;
use crate::quadrature::{QuadratureConfig, QuadratureError};

/// Tolerance of the envelope, cone and positivity checks.
pub const CHECK_TOL: f64 = 1e-8;

/// Which operator of the family is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// `T_n` with shift `1/n`.
    Regularized(u64),
    /// `1/n = 0`.
    Limit,
}

impl Stage {
    pub fn shift(&self) -> f64 {
        match self {
            Self::Regularized(n) => 1.0 / *n as f64,
            Self::Limit => 0.0,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Regularized(n) => write!(f, "{n}"),
            Self::Limit => f.write_str("limit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Number of grid nodes.
    pub m: usize,
    /// Sup-norm bound on `T x − x` at which an iteration stops.
    pub fp_tol: f64,
    /// Relaxation weight `d` in `x ← (1−d)x + d·T x`.
    pub damping: f64,
    /// Regularization indices; `None` means `n₀·{1, 2, 4, 8, 16}`.
    pub n_schedule: Option<Vec<u64>>,
    pub max_iters: usize,
    /// Finish with the unregularized operator when drift along the schedule
    /// has not fallen below `fp_tol`.
    pub limit_stage: bool,
    /// Track the antitone enclosure rails during each fixed-`n` solve.
    pub enclosure: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            m: 65,
            fp_tol: 1e-9,
            damping: 0.5,
            n_schedule: None,
            max_iters: 500,
            limit_stage: true,
            enclosure: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 8 {
            return Err(Error::config(format!("solver.m must be at least 8, got {}", self.m)));
        }
        if !(self.fp_tol > 0.0 && self.fp_tol.is_finite()) {
            return Err(Error::config(format!(
                "solver.fp_tol must be positive, got {}",
                self.fp_tol
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::config(format!(
                "solver.damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::config("solver.max_iters must be positive"));
        }
        if let Some(s) = &self.n_schedule {
            if s.is_empty() {
                return Err(Error::config("solver.n_schedule must not be empty"));
            }
            if s.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::config("solver.n_schedule must be strictly increasing"));
            }
        }
        Ok(())
    }

    /// The schedule for first index `n0`.
    pub fn schedule(&self, n0: u64) -> Result<Vec<u64>> {
        let s = match &self.n_schedule {
            Some(s) => s.clone(),
            None => [1, 2, 4, 8, 16].iter().map(|k| k * n0).collect(),
        };
        if s[0] < n0 {
            return Err(Error::config(format!(
                "solver.n_schedule must start at or above n0 = {n0}, got {}",
                s[0]
            )));
        }
        Ok(s)
    }
}

/// Relative accuracy requested of each node integral in [`apply_tn`].
pub const NODE_REL_TOL: f64 = 1e-10;

/// Error estimate, relative to the largest node value, up to which a node
/// integral that stopped refining is still accepted. Refinement stalls on
/// rounding noise of the interpolant next to the endpoints, where the
/// unregularized `f` is most sensitive to it.
pub const NODE_ACCEPT_TOL: f64 = 1e-9;

/// Same for zone values, relative to the value itself.
pub const ZONE_ACCEPT_TOL: f64 = 1e-6;

/// `T_n x` at every node of `x`'s grid and on its left-end zone.
pub fn apply_tn(x: &SolutionGrid, stage: Stage, problem: &Problem, quad: &QuadratureConfig) -> Result<SolutionGrid> {
    if let Stage::Regularized(0) = stage {
        return Err(Error::domain("regularization index n must be positive"));
    }
    let g = problem.greens();
    if x.params() != g {
        return Err(Error::domain("grid and problem live on different intervals or orders"));
    }
    let f = problem.f();
    let shift = stage.shift();
    let y = |tau: &LogCoord| f.value_at(tau, x.eval_coord(tau).abs() + shift);
    let nodes = x.nodes();
    let m = nodes.len();
    let zone = zone_coords(g);
    let points: Vec<&LogCoord> = nodes.iter().chain(&zone).collect();
    // Node values are needed to absolute accuracy, zone values relatively.
    let node_quad = quad.with_rel_tol_at_least(NODE_REL_TOL);
    let zone_quad = QuadratureConfig {
        abs_tol: f64::MIN_POSITIVE,
        ..node_quad
    };
    let results = points
        .par_iter()
        .enumerate()
        .map(|(j, c)| {
            if j == 0 || j == m - 1 {
                return Ok(None);
            }
            let q = if j < m { &node_quad } else { &zone_quad };
            g.apply(c, y, q).map(Some).map_err(|e| node_error(e, j, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = results[..m]
        .iter()
        .flatten()
        .fold(0.0f64, |acc, r| acc.max(r.value.abs()));
    let mut values = Vec::with_capacity(results.len());
    for (j, r) in results.into_iter().enumerate() {
        let Some(r) = r else {
            values.push(0.0);
            continue;
        };
        let bound = if j < m {
            NODE_ACCEPT_TOL * scale
        } else {
            ZONE_ACCEPT_TOL * r.value.abs()
        };
        if !r.converged && !(r.error_estimate <= bound) {
            return Err(node_error(
                Error::Quadrature(QuadratureError::NotConverged {
                    value: r.value,
                    error_estimate: r.error_estimate,
                    levels: r.levels_used,
                }),
                j,
                points[j],
            ));
        }
        values.push(r.value);
    }
    let zone_values = values.split_off(m);
    x.with_values(values)?.with_zone(zone_values)
}

fn node_error(e: Error, node: usize, c: &LogCoord) -> Error {
    match e {
        Error::Quadrature(source) => Error::NodeQuadrature { node, s: c.s, source },
        other => other,
    }
}

/// `∫_a^b G(t, τ) y(τ) dτ/τ` at the nodes of an `m`-point grid.
pub fn solve_linear<Y>(params: &GreensParams, y: Y, m: usize, quad: &QuadratureConfig) -> Result<SolutionGrid>
where
    Y: Fn(&LogCoord) -> f64 + Sync,
{
    let grid = SolutionGrid::zeros(*params, m)?;
    let values = grid
        .nodes()
        .par_iter()
        .enumerate()
        .map(|(j, node)| {
            if j == 0 || j + 1 == m {
                return Ok(0.0);
            }
            params
                .apply(node, &y, quad)
                .and_then(|r| Ok(r.require_converged()?))
                .map_err(|e| node_error(e, j, node))
        })
        .collect::<Result<Vec<f64>>>()?;
    grid.with_values(values)
}

/// Outcome of one fixed-`n` iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub solution: SolutionGrid,
    pub stage: Stage,
    /// Number of relaxation updates performed.
    pub iterations: usize,
    /// `‖T x − x‖` at the returned `x`.
    pub fp_residual: f64,
    /// Sup-width between the enclosure rails after each rail step.
    pub enclosure_widths: Vec<f64>,
    /// Whether the rails stayed ordered (upper ≥ lower) at every node.
    pub enclosure_ordered: bool,
}

impl FixedPoint {
    pub fn enclosure_width(&self) -> f64 {
        self.enclosure_widths.last().copied().unwrap_or(f64::NAN)
    }
}

/// Antitone-pair rails: `lower₀ = r·w`, `upper_k = T lower_k`,
/// `lower_{k+1} = T upper_k`. When `f` is non-increasing in `x`, every fixed
/// point lies between them and their gap never grows.
struct Rails {
    lower: SolutionGrid,
    upper: SolutionGrid,
    widths: Vec<f64>,
    ordered: bool,
    active: bool,
}

impl Rails {
    fn new(problem: &Problem, template: &SolutionGrid, stage: Stage, quad: &QuadratureConfig) -> Result<Self> {
        let g = problem.greens();
        let r = problem.r_lower();
        let lower = SolutionGrid::from_fn(*g, template.len(), |c| r * g.w(c))?;
        let upper = apply_tn(&lower, stage, problem, quad)?;
        let mut rails = Self {
            lower,
            upper,
            widths: Vec::new(),
            ordered: true,
            active: true,
        };
        rails.record();
        Ok(rails)
    }

    fn record(&mut self) {
        let mut width = 0.0f64;
        for (u, l) in self.upper.values().iter().zip(self.lower.values()) {
            if *u < *l - 1e-12 * u.abs().max(1.0) {
                self.ordered = false;
            }
            width = width.max(u - l);
        }
        self.widths.push(width);
    }

    fn step(&mut self, stage: Stage, problem: &Problem, quad: &QuadratureConfig, tol: f64) -> Result<()> {
        if !self.active {
            return Ok(());
        }
        self.lower = apply_tn(&self.upper, stage, problem, quad)?;
        self.upper = apply_tn(&self.lower, stage, problem, quad)?;
        self.record();
        let n = self.widths.len();
        let (prev, cur) = (self.widths[n - 2], self.widths[n - 1]);
        if cur <= tol || cur >= prev * (1.0 - 1e-6) {
            self.active = false;
        }
        Ok(())
    }
}

/// Damped iteration `x ← (1−d)x + d·T_n x` from `x0` until `‖T x − x‖ ≤ fp_tol`.
pub fn solve_fixed_n(
    x0: &SolutionGrid,
    stage: Stage,
    problem: &Problem,
    cfg: &SolveConfig,
    quad: &QuadratureConfig,
) -> Result<FixedPoint> {
    cfg.validate()?;
    let mut rails = if cfg.enclosure {
        Some(Rails::new(problem, x0, stage, quad)?)
    } else {
        None
    };
    let d = cfg.damping;
    let mut x = x0.clone();
    let mut residual = f64::INFINITY;
    for k in 0..=cfg.max_iters {
        let tx = apply_tn(&x, stage, problem, quad)?;
        residual = tx.distance(&x);
        log::debug!("n = {stage}: iteration {k}, |Tx - x| = {residual:e}");
        if residual <= cfg.fp_tol {
            let (enclosure_widths, enclosure_ordered) = match rails {
                Some(r) => (r.widths, r.ordered),
                None => (Vec::new(), true),
            };
            return Ok(FixedPoint {
                solution: x,
                stage,
                iterations: k,
                fp_residual: residual,
                enclosure_widths,
                enclosure_ordered,
            });
        }
        if k == cfg.max_iters {
            break;
        }
        x = x.relax(&tx, d)?;
        if let Some(r) = rails.as_mut() {
            r.step(stage, problem, quad, cfg.fp_tol)?;
        }
    }
    Err(Error::NonConvergence {
        n: stage.to_string(),
        iterations: cfg.max_iters,
        residual,
        bracket_width: rails.map_or(f64::NAN, |r| r.widths.last().copied().unwrap_or(f64::NAN)),
    })
}

/// One completed stage of the continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub stage: Stage,
    pub iterations: usize,
    pub fp_residual: f64,
    /// Sup-distance to the previous stage's solution (`NaN` for the first).
    pub drift: f64,
    pub enclosure_widths: Vec<f64>,
    pub enclosure_ordered: bool,
}

/// Residual of the differential equation and of the boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// `max |HD^μ x + f(t, x)|` over the interior probes.
    pub sup: f64,
    pub worst_t: f64,
    /// `(|x(a)|, |a·x'(a)|, |x(b)|)`; the slope is the one-sided difference to the first interior node.
    pub boundary: [f64; 3],
}

/// Acceptance thresholds for [`Residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualTolerances {
    pub interior: f64,
    pub x_a: f64,
    pub dx_a: f64,
    pub x_b: f64,
}

impl Default for ResidualTolerances {
    fn default() -> Self {
        Self {
            interior: 1e-3,
            x_a: 1e-10,
            dx_a: 1e-4,
            x_b: 1e-10,
        }
    }
}

impl Residual {
    pub fn within(&self, tol: &ResidualTolerances) -> bool {
        self.sup <= tol.interior
            && self.boundary[0] <= tol.x_a
            && self.boundary[1] <= tol.dx_a
            && self.boundary[2] <= tol.x_b
    }
}

/// Number of interior residual probes, evenly spaced over `s ∈ [0.05L, 0.95L]`.
pub const RESIDUAL_PROBES: usize = 19;

/// Residual of `HD^μ x + rhs(t, x) = 0` for the interpolant of `x`.
pub fn residual_with<R>(x: &SolutionGrid, rhs: R, quad: &QuadratureConfig) -> Result<Residual>
where
    R: Fn(&LogCoord, f64) -> f64 + Sync,
{
    let p = x.params();
    let iv = *p.interval();
    let l = p.log_len();
    let probes: Vec<LogCoord> = (0..RESIDUAL_PROBES)
        .map(|k| iv.coord_at_s(l * (0.05 + 0.9 * k as f64 / (RESIDUAL_PROBES - 1) as f64)))
        .collect();
    let interp = |s: f64| x.eval_nodal(&iv.coord_from_parts(s, l - s));
    let values = probes
        .par_iter()
        .map(|c| {
            let d = hadamard_derivative_log(interp, p.mu(), &iv, c.s, quad)?;
            Ok((d + rhs(c, x.eval_nodal(c))).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mut sup, mut worst_t) = (0.0, probes[0].t);
    for (c, v) in probes.iter().zip(&values) {
        if !(*v <= sup) {
            sup = *v;
            worst_t = c.t;
        }
    }
    let n = x.len();
    let first = &x.nodes()[1];
    let slope_a = (x.values()[1] - x.values()[0]) / first.s;
    Ok(Residual {
        sup,
        worst_t,
        boundary: [x.values()[0].abs(), slope_a.abs(), x.values()[n - 1].abs()],
    })
}

/// Residual of the boundary value problem for `x`.
pub fn verify_residual(x: &SolutionGrid, problem: &Problem, quad: &QuadratureConfig) -> Result<Residual> {
    let f = problem.f();
    residual_with(x, |c, v| f.value_at(c, v), quad)
}

/// Result of the full continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: SolutionGrid,
    /// `f(ϑ, ρ) L^μ / Γ(μ+2)`
    pub r_lower: f64,
    /// `R − ε`
    pub radius: f64,
    pub envelope_ok: bool,
    pub cone_ok: bool,
    pub positivity_ok: bool,
    /// `min` over interior nodes of `x/w`.
    pub min_ratio: f64,
    /// `min` over nodes and midpoints of `x(t) − w(t)‖x‖`.
    pub cone_slack: f64,
    pub residual: Residual,
    pub n_final: Stage,
    pub stages: Vec<StageReport>,
    /// Regularized drifts shrink along the schedule.
    pub drift_decreasing: bool,
    /// `‖T_{n_final} x − x‖`, recomputed after the solve.
    pub certificate: f64,
    pub converged: bool,
}

impl SolveReport {
    /// All checks an accepted solution has to pass.
    pub fn accepted(&self) -> bool {
        self.converged && self.envelope_ok && self.cone_ok
    }
}

/// Continuation along the schedule from `(R − ε)·w`, then the limit stage.
pub fn solve(
    problem: &Problem,
    cfg: &SolveConfig,
    conditions: &ConditionReport,
    quad: &QuadratureConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let sel = match conditions.selection() {
        Some(s) if conditions.a3_ok() => s,
        _ => return Err(Error::domain("solving requires the (A3) condition to hold")),
    };
    let schedule = cfg.schedule(sel.n0)?;
    let g = *problem.greens();
    let radius = sel.radius();
    let mut x = SolutionGrid::from_fn(g, cfg.m, |c| radius * g.w(c))?;
    let mut stages = Vec::new();
    let mut stabilized = false;
    let mut prev: Option<SolutionGrid> = None;
    let mut run = |stage: Stage, x: &SolutionGrid, prev: &Option<SolutionGrid>| -> Result<(SolutionGrid, f64)> {
        let fp = solve_fixed_n(x, stage, problem, cfg, quad)?;
        let drift = prev.as_ref().map_or(f64::NAN, |p| p.distance(&fp.solution));
        log::info!(
            "n = {stage}: {} iterations, |Tx - x| = {:e}, drift = {drift:e}",
            fp.iterations,
            fp.fp_residual
        );
        stages.push(StageReport {
            stage,
            iterations: fp.iterations,
            fp_residual: fp.fp_residual,
            drift,
            enclosure_widths: fp.enclosure_widths,
            enclosure_ordered: fp.enclosure_ordered,
        });
        Ok((fp.solution, drift))
    };
    let mut n_final = Stage::Regularized(schedule[0]);
    for &n in &schedule {
        let (next, drift) = run(Stage::Regularized(n), &x, &prev)?;
        x = next;
        prev = Some(x.clone());
        n_final = Stage::Regularized(n);
        if drift <= cfg.fp_tol {
            stabilized = true;
            break;
        }
    }
    let converged = if stabilized {
        true
    } else if cfg.limit_stage {
        let (next, _) = run(Stage::Limit, &x, &prev)?;
        x = next;
        n_final = Stage::Limit;
        true
    } else {
        false
    };
    let drifts: Vec<f64> = stages
        .iter()
        .filter(|s| matches!(s.stage, Stage::Regularized(_)))
        .map(|s| s.drift)
        .filter(|d| !d.is_nan())
        .collect();
    let drift_decreasing = drifts.windows(2).all(|w| w[1] <= w[0]);

    let certificate = apply_tn(&x, n_final, problem, quad)?.distance(&x);
    let r_lower = problem.r_lower();
    let norm = x.sup_norm_refined();
    let mut envelope_ok = true;
    let mut min_ratio = f64::INFINITY;
    let last = x.len() - 1;
    for (j, (c, v)) in x.nodes().iter().zip(x.values()).enumerate() {
        let w = g.w(c);
        if !(r_lower * w - CHECK_TOL <= *v && *v <= radius + CHECK_TOL) {
            envelope_ok = false;
        }
        if j > 0 && j < last {
            min_ratio = min_ratio.min(v / w);
        }
    }
    let positivity_ok = min_ratio >= r_lower - CHECK_TOL && x.values()[1..last].iter().all(|v| *v > 0.0);
    let mut cone_slack = f64::INFINITY;
    for c in x.nodes().iter().chain(x.midpoints().iter()) {
        cone_slack = cone_slack.min(x.eval_nodal(c) - g.w(c) * norm);
    }
    let cone_ok = cone_slack >= -CHECK_TOL;
    let residual = verify_residual(&x, problem, quad)?;
    Ok(SolveReport {
        solution: x,
        r_lower,
        radius,
        envelope_ok,
        cone_ok,
        positivity_ok,
        min_ratio,
        cone_slack,
        residual,
        n_final,
        stages,
        drift_decreasing,
        certificate,
        converged,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m = {}", self.solution.len())?;
        for (i, s) in self.stages.iter().enumerate() {
            writeln!(f, "stage{i}.n = {}", s.stage)?;
            writeln!(f, "stage{i}.iterations = {}", s.iterations)?;
            writeln!(f, "stage{i}.fp_residual = {:.16e}", s.fp_residual)?;
            writeln!(f, "stage{i}.drift = {:.16e}", s.drift)?;
            if let Some(w) = s.enclosure_widths.last() {
                writeln!(f, "stage{i}.enclosure_width = {w:.16e}")?;
                writeln!(f, "stage{i}.enclosure_ordered = {}", s.enclosure_ordered)?;
            }
        }
        writeln!(f, "n_final = {}", self.n_final)?;
        writeln!(f, "drift_decreasing = {}", self.drift_decreasing)?;
        writeln!(f, "certificate = {:.16e}", self.certificate)?;
        writeln!(f, "sup_norm = {:.16e}", self.solution.sup_norm_refined())?;
        writeln!(f, "r_lower = {:.16e}", self.r_lower)?;
        writeln!(f, "radius = {:.16e}", self.radius)?;
        writeln!(f, "min_ratio = {:.16e}", self.min_ratio)?;
        writeln!(f, "cone_slack = {:.16e}", self.cone_slack)?;
        writeln!(f, "envelope = {}", verdict(self.envelope_ok))?;
        writeln!(f, "cone = {}", verdict(self.cone_ok))?;
        writeln!(f, "positivity = {}", verdict(self.positivity_ok))?;
        write_residual(f, &self.residual)?;
        writeln!(f, "converged = {}", self.converged)?;
        writeln!(f, "status = {}", verdict(self.accepted()))
    }
}

/// `key = value` lines for a [`Residual`].
pub fn write_residual(f: &mut impl fmt::Write, r: &Residual) -> fmt::Result {
    writeln!(f, "residual_sup = {:.16e}", r.sup)?;
    writeln!(f, "residual_worst_t = {:.16e}", r.worst_t)?;
    writeln!(f, "boundary.x_a = {:.16e}", r.boundary[0])?;
    writeln!(f, "boundary.a_dx_a = {:.16e}", r.boundary[1])?;
    writeln!(f, "boundary.x_b = {:.16e}", r.boundary[2])
}
