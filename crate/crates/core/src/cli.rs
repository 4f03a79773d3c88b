//! Problem files and the subcommands behind the `hbvp` binary.
//!
//! A problem file is TOML:
//!
//! ```toml
//! a = 1.0
//! b = 2.718281828459045
//! mu = 2.9
//! f = "lambda / ((ln(t))^1.9 * ln(2.718281828459045/t))^0.25 * (sqrt(x) + 2/x^0.25)"
//! # vartheta = 1.92    optional, located automatically when absent
//! # rho = 1.0          optional, located automatically when absent
//!
//! [params]
//! lambda = 1.1201361835934955
//!
//! [solver]         # optional
//! m = 65
//! fp_tol = 1e-9
//! damping = 0.5
//! n_schedule = [6, 12, 24]
//! max_iters = 500
//!
//! [quadrature]     # optional
//! rel_tol = 1e-12
//! abs_tol = 1e-14
//! max_levels = 12
//!
//! [residual]       # optional acceptance tolerances for `residual`
//! interior = 1e-3
//! x_a = 1e-10
//! dx_a = 1e-4
//! x_b = 1e-10
//! ```
//!
//! Unknown keys are rejected. Every command returns an [`Exit`] code or a
//! [`CliError`] whose message names the offending key.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::Path;

use serde::Deserialize;

use crate::conditions::{check_all, ConditionReport, Problem};
use crate::error::Error;
use crate::expr::{parse_with_params, Nonlinearity};
use crate::frac::{Interval, Order};
use crate::greens::{certify_bounds, GreensParams};
use crate::quadrature::QuadratureConfig;
use crate::solver::{solve, verify_residual, write_residual, ResidualTolerances, SolutionGrid, SolveConfig};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    ConditionFail = 1,
    InputError = 2,
    NumericError = 3,
    SolverFail = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A command that could not produce its report.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::InputError,
            message: message.into(),
        }
    }

    fn at_key(key: &str, e: impl fmt::Display) -> Self {
        Self::input(format!("key `{key}`: {e}"))
    }

    fn numeric(e: impl fmt::Display) -> Self {
        Self {
            exit: Exit::NumericError,
            message: e.to_string(),
        }
    }

    fn io(what: &str, path: &Path, e: io::Error) -> Self {
        Self::input(format!("cannot {what} {}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::numeric(format!("output error: {e}"))
    }
}

pub type CliResult = Result<Exit, CliError>;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub f: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub vartheta: Option<f64>,
    pub rho: Option<f64>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub residual: ResidualSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub m: Option<usize>,
    pub fp_tol: Option<f64>,
    pub damping: Option<f64>,
    pub n_schedule: Option<Vec<u64>>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_levels: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualSection {
    pub interior: Option<f64>,
    pub x_a: Option<f64>,
    pub dx_a: Option<f64>,
    pub x_b: Option<f64>,
}

/// A validated problem file.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub problem: Problem,
    pub solver: SolveConfig,
    pub quadrature: QuadratureConfig,
    pub residual: ResidualTolerances,
}

impl ProblemFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::input(format!("invalid problem file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io("read", path, e))?;
        Self::from_toml(&text)
    }

    /// Re-validates every constraint and builds the problem.
    pub fn load(&self) -> Result<LoadedProblem, CliError> {
        let interval = Interval::new(self.a, self.b).map_err(|e| {
            let key = if !(self.a.is_finite() && self.a > 0.0) {
                "a"
            } else {
                "b"
            };
            CliError::at_key(key, e)
        })?;
        let mu = Order::for_bvp(self.mu).map_err(|e| CliError::at_key("mu", e))?;
        for (name, value) in &self.params {
            let key = format!("params.{name}");
            if !is_identifier(name) || name == "t" || name == "x" {
                return Err(CliError::at_key(
                    &key,
                    "parameter names must be identifiers other than t and x",
                ));
            }
            if !value.is_finite() {
                return Err(CliError::at_key(&key, format!("value must be finite, got {value}")));
            }
        }
        let declared: Vec<&str> = self.params.keys().map(String::as_str).collect();
        let ast = parse_with_params(&self.f, &declared).map_err(|e| CliError::at_key("f", e))?;
        if let Some(unused) = self.params.keys().find(|name| !ast.mentions(name)) {
            return Err(CliError::at_key(
                &format!("params.{unused}"),
                "parameter is not used by f",
            ));
        }
        let f = Nonlinearity::new(ast, self.params.clone(), interval).map_err(|e| CliError::at_key("f", e))?;
        for (key, v) in [("vartheta", self.vartheta), ("rho", self.rho)] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(CliError::at_key(key, "value must be finite"));
            }
        }
        let problem = Problem::new(f, mu, self.vartheta, self.rho).map_err(|e| {
            let text = e.to_string();
            let key = if text.contains("vartheta") {
                "vartheta"
            } else if text.contains("rho") {
                "rho"
            } else {
                "f"
            };
            CliError::at_key(key, text)
        })?;

        let d = SolveConfig::default();
        let s = &self.solver;
        let solver = SolveConfig {
            m: s.m.unwrap_or(d.m),
            fp_tol: s.fp_tol.unwrap_or(d.fp_tol),
            damping: s.damping.unwrap_or(d.damping),
            n_schedule: s.n_schedule.clone().or(d.n_schedule),
            max_iters: s.max_iters.unwrap_or(d.max_iters),
            ..d
        };
        solver.validate().map_err(|e| CliError::input(e.to_string()))?;
        if solver.n_schedule.as_ref().is_some_and(|n| n[0] == 0) {
            return Err(CliError::at_key("solver.n_schedule", "entries must be positive"));
        }

        let d = QuadratureConfig::default();
        let q = &self.quadrature;
        let quadrature = QuadratureConfig {
            rel_tol: q.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: q.abs_tol.unwrap_or(d.abs_tol),
            max_levels: q.max_levels.unwrap_or(d.max_levels),
        };
        quadrature.validate().map_err(|e| CliError::at_key("quadrature", e))?;

        let d = ResidualTolerances::default();
        let r = &self.residual;
        let residual = ResidualTolerances {
            interior: r.interior.unwrap_or(d.interior),
            x_a: r.x_a.unwrap_or(d.x_a),
            dx_a: r.dx_a.unwrap_or(d.dx_a),
            x_b: r.x_b.unwrap_or(d.x_b),
        };
        for (key, v) in [
            ("residual.interior", residual.interior),
            ("residual.x_a", residual.x_a),
            ("residual.dx_a", residual.dx_a),
            ("residual.x_b", residual.x_b),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::at_key(
                    key,
                    format!("tolerance must be finite and non-negative, got {v}"),
                ));
            }
        }

        Ok(LoadedProblem {
            problem,
            solver,
            quadrature,
            residual,
        })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reads and validates a problem file.
pub fn load_problem(path: &Path) -> Result<LoadedProblem, CliError> {
    ProblemFile::read(path)?.load()
}

fn run_checks(p: &LoadedProblem) -> Result<ConditionReport, CliError> {
    check_all(&p.problem, &p.quadrature).map_err(CliError::numeric)
}

fn solver_error(e: Error) -> CliError {
    match e {
        Error::NonConvergence { .. } => CliError {
            exit: Exit::SolverFail,
            message: e.to_string(),
        },
        e => CliError::numeric(e),
    }
}

/// `check <file>`: runs the admissibility checks and prints the report.
pub fn cmd_check(path: &Path, out: &mut dyn Write) -> CliResult {
    let p = load_problem(path)?;
    let report = run_checks(&p)?;
    write!(out, "{report}")?;
    Ok(if report.all_ok() { Exit::Ok } else { Exit::ConditionFail })
}

/// `solve <file> --out <csv>`: checks, solves, writes the CSV and prints the
/// report.
pub fn cmd_solve(path: &Path, out_csv: &Path, out: &mut dyn Write) -> CliResult {
    let p = load_problem(path)?;
    let conditions = run_checks(&p)?;
    if !conditions.all_ok() {
        write!(out, "{conditions}")?;
        return Ok(Exit::ConditionFail);
    }
    let report = solve(&p.problem, &p.solver, &conditions, &p.quadrature).map_err(solver_error)?;
    let file = fs::File::create(out_csv).map_err(|e| CliError::io("create", out_csv, e))?;
    let mut w = io::BufWriter::new(file);
    report
        .solution
        .write_csv(&mut w, report.r_lower)
        .and_then(|()| w.flush())
        .map_err(|e| CliError::io("write", out_csv, e))?;
    write!(out, "{report}")?;
    Ok(if report.accepted() { Exit::Ok } else { Exit::SolverFail })
}

/// `validate-green --a --b --mu --grid`: certifies the envelope bounds of the
/// Green's function.
pub fn cmd_validate_green(a: f64, b: f64, mu: f64, grid_n: usize, out: &mut dyn Write) -> CliResult {
    let interval = Interval::new(a, b).map_err(|e| CliError::at_key(if a > 0.0 { "b" } else { "a" }, e))?;
    let order = Order::for_bvp(mu).map_err(|e| CliError::at_key("mu", e))?;
    if grid_n < 2 {
        return Err(CliError::at_key("grid", format!("must be at least 2, got {grid_n}")));
    }
    let params = GreensParams::new(interval, order).map_err(CliError::numeric)?;
    let report = certify_bounds(&params, grid_n).map_err(CliError::numeric)?;
    write!(out, "{report}")?;
    Ok(if report.passed() { Exit::Ok } else { Exit::ConditionFail })
}

/// `residual <file> <csv>`: residual of a solution written by `solve`.
pub fn cmd_residual(path: &Path, solution_csv: &Path, out: &mut dyn Write) -> CliResult {
    let p = load_problem(path)?;
    let file = fs::File::open(solution_csv).map_err(|e| CliError::io("open", solution_csv, e))?;
    let grid = SolutionGrid::read_csv(*p.problem.greens(), BufReader::new(file))
        .map_err(|e| CliError::input(format!("{}: {e}", solution_csv.display())))?;
    let r = verify_residual(&grid, &p.problem, &p.quadrature).map_err(CliError::numeric)?;
    let mut text = String::new();
    write_residual(&mut text, &r).expect("writing to a String");
    let ok = r.within(&p.residual);
    write!(out, "{text}")?;
    writeln!(out, "status = {}", if ok { "pass" } else { "FAIL" })?;
    Ok(if ok { Exit::Ok } else { Exit::ConditionFail })
}
