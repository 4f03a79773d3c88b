use std::f64::consts::PI;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::frac::LogCoord;
use crate::greens::GreensParams;

/// Exponent of the endpoint grading `s = L ξ^q / (ξ^q + (1-ξ)^q)`.
pub const GRADING: i32 = 3;

pub const CSV_HEADER: &str = "t,s,x,w,r_lower_w";

/// Points of the left-end zone.
pub const ZONE_POINTS: usize = 32;

/// The zone covers `s ∈ [ZONE_BOTTOM·L, ZONE_TOP·L]`.
pub const ZONE_TOP: f64 = 1e-4;
pub const ZONE_BOTTOM: f64 = 1e-30;

/// Nodal values of a function on `[a, b]` vanishing at both ends.
///
/// Nodes are Chebyshev points of the second kind in a graded variable
/// `ξ ∈ [0, 1]` that clusters them algebraically at both endpoints, where
/// solutions behave like fractional powers of `ln(t/a)` and `ln(b/t)`.
/// Between nodes the function is evaluated by barycentric interpolation in
/// `ξ`.
///
/// A grid may also carry values on a left-end zone `s ≤ ZONE_TOP·L`, where
/// a solution is of size `s^{μ-1}` and a polynomial in `ξ` cannot keep its
/// relative accuracy. There `x / s^{μ-1}` is interpolated in `ln s` instead.
/// Zone values are only ever produced by sampling a function or by applying
/// an integral operator, so grids built from bare node values have no zone.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionGrid {
    params: GreensParams,
    xi: Vec<f64>,
    xic: Vec<f64>,
    nodes: Vec<LogCoord>,
    values: Vec<f64>,
    zone: Option<Vec<f64>>,
}

/// Sampling points of the left-end zone: Chebyshev points in `ln s`.
pub fn zone_coords(params: &GreensParams) -> Vec<LogCoord> {
    let l = params.log_len();
    let iv = params.interval();
    let (lo, hi) = ((ZONE_BOTTOM * l).ln(), (ZONE_TOP * l).ln());
    (0..ZONE_POINTS)
        .map(|k| {
            let (p, q) = node_xi(k, ZONE_POINTS);
            let s = if k + 1 == ZONE_POINTS {
                ZONE_TOP * l
            } else {
                (lo * q + hi * p).exp()
            };
            iv.coord_from_parts(s, l - s)
        })
        .collect()
}

fn zone_lambda(params: &GreensParams) -> (f64, f64) {
    let l = params.log_len();
    ((ZONE_BOTTOM * l).ln(), (ZONE_TOP * l).ln())
}

/// Barycentric interpolation on Chebyshev points of the second kind, given
/// the signed distances `d(j)` from the query to every node.
fn barycentric<D: Fn(usize) -> f64>(values: &[f64], d: D) -> f64 {
    let m = values.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, v) in values.iter().enumerate() {
        let dj = d(j);
        if dj == 0.0 {
            return *v;
        }
        let mut wj = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == m - 1 {
            wj *= 0.5;
        }
        let k = wj / dj;
        num += k * v;
        den += k;
    }
    num / den
}

/// `(ξ, 1-ξ)` of node `j` out of `m`, each accurate near its own endpoint.
fn node_xi(j: usize, m: usize) -> (f64, f64) {
    let last = m - 1;
    let angle = |k: usize| PI * k as f64 / (2 * last) as f64;
    if 2 * j == last {
        (0.5, 0.5)
    } else if 2 * j < last {
        let th = angle(j);
        (th.sin().powi(2), th.cos().powi(2))
    } else {
        let th = angle(last - j);
        (th.cos().powi(2), th.sin().powi(2))
    }
}

fn graded(xi: f64, xic: f64, l: f64) -> (f64, f64) {
    let (p, q) = (xi.powi(GRADING), xic.powi(GRADING));
    let d = p + q;
    (l * p / d, l * q / d)
}

fn ungraded(s: f64, sc: f64) -> (f64, f64) {
    if s <= 0.0 {
        return (0.0, 1.0);
    }
    if sc <= 0.0 {
        return (1.0, 0.0);
    }
    let r = (s / sc).powf(1.0 / GRADING as f64);
    (r / (1.0 + r), 1.0 / (1.0 + r))
}

impl SolutionGrid {
    /// Grid of `m ≥ 8` nodes holding zeros.
    pub fn zeros(params: GreensParams, m: usize) -> Result<Self> {
        if m < 8 {
            return Err(Error::config(format!("grid size m must be at least 8, got {m}")));
        }
        let l = params.log_len();
        let iv = *params.interval();
        let (xi, xic): (Vec<f64>, Vec<f64>) = (0..m).map(|j| node_xi(j, m)).unzip();
        let nodes = xi
            .iter()
            .zip(&xic)
            .map(|(&p, &q)| {
                let (s, sc) = graded(p, q, l);
                iv.coord_from_parts(s, sc)
            })
            .collect();
        Ok(Self {
            params,
            xi,
            xic,
            nodes,
            values: vec![0.0; m],
            zone: None,
        })
    }

    /// Samples `g` at the interior nodes and on the zone; boundary values
    /// are set to zero.
    pub fn from_fn<G: FnMut(&LogCoord) -> f64>(params: GreensParams, m: usize, mut g: G) -> Result<Self> {
        let mut grid = Self::zeros(params, m)?;
        let last = m - 1;
        for j in 1..last {
            grid.values[j] = g(&grid.nodes[j]);
        }
        let zone = zone_coords(&params).iter().map(&mut g).collect();
        grid.with_zone(zone)
    }

    /// Attaches zone samples taken at [`zone_coords`].
    pub fn with_zone(mut self, zone_values: Vec<f64>) -> Result<Self> {
        if zone_values.len() != ZONE_POINTS {
            return Err(Error::config(format!(
                "expected {ZONE_POINTS} zone values, got {}",
                zone_values.len()
            )));
        }
        let p = self.params.mu().value() - 1.0;
        let coords = zone_coords(&self.params);
        self.zone = Some(zone_values.iter().zip(&coords).map(|(v, c)| v / c.s.powf(p)).collect());
        Ok(self)
    }

    pub fn has_zone(&self) -> bool {
        self.zone.is_some()
    }

    /// Zone samples, if any, at [`zone_coords`].
    pub fn zone_values(&self) -> Option<Vec<f64>> {
        let p = self.params.mu().value() - 1.0;
        let coords = zone_coords(&self.params);
        self.zone
            .as_ref()
            .map(|z| z.iter().zip(&coords).map(|(v, c)| v * c.s.powf(p)).collect())
    }

    /// `(1 − d)·self + d·other`, zone included when both carry one.
    pub fn relax(&self, other: &Self, d: f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (1.0 - d) * a + d * b)
            .collect();
        let mut out = self.with_values(values)?;
        if let (Some(a), Some(b)) = (&self.zone, &other.zone) {
            out.zone = Some(a.iter().zip(b).map(|(a, b)| (1.0 - d) * a + d * b).collect());
        }
        Ok(out)
    }

    /// Same nodes, new values and no zone. Boundary entries are forced to zero.
    pub fn with_values(&self, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::config(format!(
                "expected {} nodal values, got {}",
                self.len(),
                values.len()
            )));
        }
        let last = values.len() - 1;
        values[0] = 0.0;
        values[last] = 0.0;
        Ok(Self {
            params: self.params,
            xi: self.xi.clone(),
            xic: self.xic.clone(),
            nodes: self.nodes.clone(),
            values,
            zone: None,
        })
    }

    pub fn params(&self) -> &GreensParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes(&self) -> &[LogCoord] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest nodal value in absolute terms.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Supremum of `|x|` over `[a, b]` for the interpolant: the largest node
    /// value refined by golden-section search between its neighbours.
    pub fn sup_norm_refined(&self) -> f64 {
        let m = self.len();
        let best = (0..m).fold(0, |b, j| {
            if self.values[j].abs() > self.values[b].abs() {
                j
            } else {
                b
            }
        });
        let lo = self.xi[best.saturating_sub(1)];
        let hi = self.xi[(best + 1).min(m - 1)];
        let l = self.params.log_len();
        let iv = *self.params.interval();
        let at = |xi: f64| {
            let (s, sc) = graded(xi, 1.0 - xi, l);
            self.eval_nodal(&iv.coord_from_parts(s, sc)).abs()
        };
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (at(x1), at(x2));
        for _ in 0..80 {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = at(x2);
            }
        }
        self.values[best].abs().max(f1).max(f2)
    }

    /// `max_i |x_i - y_i|` over common nodes.
    pub fn distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Interpolated value at a log-coordinate, from the zone when the grid
    /// has one and `c` lies in it.
    pub fn eval_coord(&self, c: &LogCoord) -> f64 {
        if let Some(z) = &self.zone {
            let l = self.params.log_len();
            if c.s < ZONE_TOP * l {
                if c.s <= 0.0 {
                    return 0.0;
                }
                let (lo, hi) = zone_lambda(&self.params);
                let u = (c.s.ln() - lo) / (hi - lo);
                let ratio = if u <= 0.0 {
                    z[0]
                } else {
                    barycentric(z, |k| {
                        let (p, q) = node_xi(k, ZONE_POINTS);
                        if 2 * k < ZONE_POINTS {
                            u - p
                        } else {
                            q - (1.0 - u)
                        }
                    })
                };
                return ratio * c.s.powf(self.params.mu().value() - 1.0);
            }
        }
        self.eval_nodal(c)
    }

    /// Interpolated value from the node values alone.
    pub fn eval_nodal(&self, c: &LogCoord) -> f64 {
        let (xi, xic) = ungraded(c.s, c.sc);
        let m = self.len();
        barycentric(&self.values, |j| {
            if 2 * j < m {
                xi - self.xi[j]
            } else {
                self.xic[j] - xic
            }
        })
    }

    /// Interpolated value at `t ∈ [a, b]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_coord(&self.params.interval().coord(t)?))
    }

    /// Midpoints in `ξ` between consecutive nodes.
    pub fn midpoints(&self) -> Vec<LogCoord> {
        let l = self.params.log_len();
        let iv = *self.params.interval();
        (0..self.len() - 1)
            .map(|j| {
                let xi = 0.5 * (self.xi[j] + self.xi[j + 1]);
                let xic = 0.5 * (self.xic[j] + self.xic[j + 1]);
                let (s, sc) = graded(xi, xic, l);
                iv.coord_from_parts(s, sc)
            })
            .collect()
    }

    /// Writes `t, s, x, w, r_lower·w` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, r_lower: f64) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for (c, x) in self.nodes.iter().zip(&self.values) {
            let w = self.params.w(c);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                c.t,
                c.s,
                x,
                w,
                r_lower * w
            )?;
        }
        Ok(())
    }

    /// Reads a CSV written by [`write_csv`](Self::write_csv). The `s` column
    /// must reproduce the node set for `params` exactly.
    pub fn read_csv<R: BufRead>(params: GreensParams, input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, l)) => l.map_err(|e| Error::config(format!("cannot read solution CSV: {e}")))?,
            None => return Err(Error::config("solution CSV is empty")),
        };
        if header.trim() != CSV_HEADER {
            return Err(Error::config(format!(
                "solution CSV header must be `{CSV_HEADER}`, got `{}`",
                header.trim()
            )));
        }
        let mut s_col = Vec::new();
        let mut x_col = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::config(format!("cannot read solution CSV: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::config(format!(
                    "solution CSV line {}: expected 5 columns, got {}",
                    i + 1,
                    fields.len()
                )));
            }
            let num = |k: usize| -> Result<f64> {
                fields[k]
                    .parse()
                    .map_err(|_| Error::config(format!("solution CSV line {}: `{}` is not a number", i + 1, fields[k])))
            };
            s_col.push(num(1)?);
            x_col.push(num(2)?);
        }
        let grid = Self::zeros(params, s_col.len())?;
        for (j, (s, c)) in s_col.iter().zip(&grid.nodes).enumerate() {
            if *s != c.s {
                return Err(Error::config(format!(
                    "solution CSV row {j}: s = {s:e} does not match grid node {:e} for this problem",
                    c.s
                )));
            }
        }
        if x_col[0] != 0.0 || x_col[x_col.len() - 1] != 0.0 {
            return Err(Error::config("solution CSV must have x = 0 in its first and last rows"));
        }
        grid.with_values(x_col)
    }
}
