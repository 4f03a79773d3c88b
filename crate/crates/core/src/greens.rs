//! Green's function of `HD^μ x + y = 0`, `x(a) = a·x'(a) = x(b) = 0`.
//!
//! In log-coordinates (`s = ln(t/a)`, `σ = ln(τ/a)`, `L = ln(b/a)`, `p = μ-1`)
//!
//! ```text
//! G(t, τ) = [ (s (L-σ) / L)^p − 1{σ<s} (s-σ)^p ] / Γ(μ)
//! ```
//!
//! The bracket is evaluated through `A - B = σ (L - s) / L` with
//! `A = s (L-σ)/L`, `B = s - σ`, so the difference is never formed by
//! cancellation. The diagonal `t = τ` belongs to the second branch.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frac::{Interval, LogCoord, Order};
use crate::quadrature::{tanh_sinh, QuadratureConfig, QuadratureResult};
use crate::special::{gamma, pow_nonneg};

/// Slack below which a certified bound counts as violated.
pub const CERTIFY_TOL: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensParams {
    interval: Interval,
    mu: Order,
    log_len: f64,
    gamma_mu: f64,
    /// `1 / (Γ(μ) L^{μ-1})`
    norm: f64,
}

impl GreensParams {
    pub fn new(interval: Interval, mu: Order) -> Result<Self> {
        let mu = Order::for_bvp(mu.value())?;
        let log_len = interval.log_len();
        let gamma_mu = gamma(mu.value());
        let norm = 1.0 / (gamma_mu * log_len.powf(mu.value() - 1.0));
        Ok(Self {
            interval,
            mu,
            log_len,
            gamma_mu,
            norm,
        })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn mu(&self) -> Order {
        self.mu
    }

    pub fn log_len(&self) -> f64 {
        self.log_len
    }

    pub fn gamma_mu(&self) -> f64 {
        self.gamma_mu
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    fn p(&self) -> f64 {
        self.mu.value() - 1.0
    }

    /// `G(t, τ)` from log-coordinates. `back` is `ln(t/τ)` when `τ < t`
    /// strictly and `None` on and above the diagonal.
    #[inline]
    pub(crate) fn kernel_parts(&self, t: &LogCoord, sigma: f64, sigma_c: f64, back: Option<f64>) -> f64 {
        let p = self.p();
        let l = self.log_len;
        let upper = t.s * sigma_c / l;
        let bracket = match back {
            Some(b) if b > 0.0 => {
                let d = sigma * t.sc / l;
                if d <= b {
                    b.powf(p) * (p * (d / b).ln_1p()).exp_m1()
                } else {
                    pow_nonneg(upper, p) - b.powf(p)
                }
            }
            _ => pow_nonneg(upper, p),
        };
        bracket / self.gamma_mu
    }

    /// `G(t, τ)` for log-coordinates of both arguments.
    pub fn kernel(&self, t: &LogCoord, tau: &LogCoord) -> f64 {
        let back = (tau.s < t.s).then_some(t.s - tau.s);
        self.kernel_parts(t, tau.s, tau.sc, back)
    }

    /// `G(t, τ)` for `t, τ ∈ [a, b]`.
    pub fn eval(&self, t: f64, tau: f64) -> Result<f64> {
        let tc = self.interval.coord(t)?;
        let tauc = self.interval.coord(tau)?;
        Ok(self.kernel(&tc, &tauc))
    }

    /// `u = (ln(t/a))^{μ-1} ln(b/t)`
    pub fn u(&self, c: &LogCoord) -> f64 {
        pow_nonneg(c.s, self.p()) * c.sc
    }

    /// `v = ln(t/a) (ln(b/t))^{μ-1}`
    pub fn v(&self, c: &LogCoord) -> f64 {
        c.s * pow_nonneg(c.sc, self.p())
    }

    /// `w = u / L^μ`
    pub fn w(&self, c: &LogCoord) -> f64 {
        self.u(c) / self.log_len.powf(self.mu.value())
    }

    pub fn envelope_u(&self, t: f64) -> Result<f64> {
        Ok(self.u(&self.interval.coord(t)?))
    }

    pub fn envelope_v(&self, t: f64) -> Result<f64> {
        Ok(self.v(&self.interval.coord(t)?))
    }

    pub fn envelope_w(&self, t: f64) -> Result<f64> {
        Ok(self.w(&self.interval.coord(t)?))
    }

    /// `∫_a^b G(t, τ) y(τ) dτ/τ`, split at `τ = t` where the kernel has a kink.
    pub fn apply<Y>(&self, t: &LogCoord, mut y: Y, quad: &QuadratureConfig) -> Result<QuadratureResult>
    where
        Y: FnMut(&LogCoord) -> f64,
    {
        let iv = self.interval;
        let below = tanh_sinh(
            t.s,
            |p, q| {
                let tau = iv.coord_from_parts(p, q + t.sc);
                let g = self.kernel_parts(t, p, q + t.sc, Some(q));
                if g == 0.0 {
                    0.0
                } else {
                    g * y(&tau)
                }
            },
            quad,
        )?;
        let above = tanh_sinh(
            t.sc,
            |p, q| {
                let tau = iv.coord_from_parts(t.s + p, q);
                let g = self.kernel_parts(t, t.s + p, q, None);
                if g == 0.0 {
                    0.0
                } else {
                    g * y(&tau)
                }
            },
            quad,
        )?;
        Ok(QuadratureResult {
            value: below.value + above.value,
            error_estimate: below.error_estimate + above.error_estimate,
            levels_used: below.levels_used.max(above.levels_used),
            converged: below.converged && above.converged,
        })
    }

    /// `∫_a^b G(t, τ) dτ/τ`, which equals `u(t)/Γ(μ+1)`.
    pub fn row_integral(&self, t: f64, quad: &QuadratureConfig) -> Result<f64> {
        let c = self.interval.coord(t)?;
        Ok(self.apply(&c, |_| 1.0, quad)?.require_converged()?)
    }
}

/// Outcome of checking the four envelope bounds on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub interval: Interval,
    pub mu: f64,
    pub grid_n: usize,
    pub bounds: [BoundCheck; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    /// Smallest `rhs - lhs` (for upper bounds) or `lhs - rhs` (lower bounds).
    pub min_slack: f64,
    pub worst_t: f64,
    pub worst_tau: f64,
}

impl BoundCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            min_slack: f64::INFINITY,
            worst_t: f64::NAN,
            worst_tau: f64::NAN,
        }
    }

    fn record(&mut self, slack: f64, t: f64, tau: f64) {
        if slack.is_nan() || (!self.min_slack.is_nan() && slack < self.min_slack) {
            self.min_slack = slack;
            self.worst_t = t;
            self.worst_tau = tau;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.record(other.min_slack, other.worst_t, other.worst_tau);
        self
    }

    pub fn passed(&self) -> bool {
        self.min_slack >= CERTIFY_TOL
    }
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.bounds.iter().all(BoundCheck::passed)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "a = {:.16e}", self.interval.a())?;
        writeln!(f, "b = {:.16e}", self.interval.b())?;
        writeln!(f, "mu = {:.16e}", self.mu)?;
        writeln!(f, "grid = {}", self.grid_n)?;
        for b in &self.bounds {
            writeln!(f, "bound.{}.min_slack = {:.16e}", b.name, b.min_slack)?;
            writeln!(f, "bound.{}.worst_t = {:.16e}", b.name, b.worst_t)?;
            writeln!(f, "bound.{}.worst_tau = {:.16e}", b.name, b.worst_tau)?;
            writeln!(
                f,
                "bound.{}.status = {}",
                b.name,
                if b.passed() { "pass" } else { "FAIL" }
            )?;
        }
        writeln!(f, "status = {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

/// Checks on a `grid_n × grid_n` uniform grid in `(s, σ)` (endpoints included)
///
/// - (i)   `G(t,τ) ≤ u(t) / (Γ(μ) L)`
/// - (ii)  `G(t,τ) ≤ v(τ) / (Γ(μ) L)`
/// - (iii) `G(t,τ) ≥ u(t) v(τ) / (Γ(μ) L^{μ+1})`
/// - (iv)  `G(t,τ) ≥ w(t) G(s,τ)` for `s` over the grid plus `grid_n`
///   quasi-random (golden-ratio) points.
pub fn certify_bounds(p: &GreensParams, grid_n: usize) -> Result<BoundReport> {
    if grid_n < 2 {
        return Err(Error::domain(format!(
            "certification grid needs at least 2 points, got {grid_n}"
        )));
    }
    let iv = *p.interval();
    let l = p.log_len();
    let mu = p.mu().value();
    let grid: Vec<LogCoord> = (0..grid_n)
        .map(|i| {
            let k = (grid_n - 1) as f64;
            iv.coord_from_parts(l * i as f64 / k, l * (grid_n - 1 - i) as f64 / k)
        })
        .collect();
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let extra: Vec<LogCoord> = (1..=grid_n)
        .map(|k| iv.coord_at_s(l * (k as f64 * golden).fract()))
        .collect();

    let upper_scale = 1.0 / (p.gamma_mu() * l);
    let lower_scale = 1.0 / (p.gamma_mu() * l.powf(mu + 1.0));

    let checks = grid
        .par_iter()
        .map(|tau| {
            let mut bounds = [
                BoundCheck::new("i"),
                BoundCheck::new("ii"),
                BoundCheck::new("iii"),
                BoundCheck::new("iv"),
            ];
            let col_max = grid
                .iter()
                .chain(extra.iter())
                .map(|s| p.kernel(s, tau))
                .fold(f64::NEG_INFINITY, f64::max);
            let v_tau = p.v(tau);
            for t in &grid {
                let g = p.kernel(t, tau);
                let u_t = p.u(t);
                bounds[0].record(u_t * upper_scale - g, t.t, tau.t);
                bounds[1].record(v_tau * upper_scale - g, t.t, tau.t);
                bounds[2].record(g - u_t * v_tau * lower_scale, t.t, tau.t);
                bounds[3].record(g - p.w(t) * col_max, t.t, tau.t);
            }
            bounds
        })
        .reduce(
            || {
                [
                    BoundCheck::new("i"),
                    BoundCheck::new("ii"),
                    BoundCheck::new("iii"),
                    BoundCheck::new("iv"),
                ]
            },
            |x, y| [x[0].merge(y[0]), x[1].merge(y[1]), x[2].merge(y[2]), x[3].merge(y[3])],
        );
    Ok(BoundReport {
        interval: iv,
        mu,
        grid_n,
        bounds: checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn example() -> GreensParams {
        GreensParams::new(Interval::new(1.0, E).unwrap(), Order::new(2.9).unwrap()).unwrap()
    }

    /// Straight transcription of the two-branch formula in `t`, `τ`.
    fn naive(a: f64, b: f64, mu: f64, t: f64, tau: f64) -> f64 {
        let l = (b / a).ln();
        let pre = 1.0 / (gamma(mu) * l.powf(mu - 1.0));
        let first = (t / a).ln().powf(mu - 1.0) * (b / tau).ln().powf(mu - 1.0);
        if tau < t {
            pre * (first - (t / tau).ln().powf(mu - 1.0) * l.powf(mu - 1.0))
        } else {
            pre * first
        }
    }

    #[test]
    fn params_normalization() {
        for &(a, b, mu) in &[(1.0, E, 2.9), (0.5, 7.3, 2.05), (2.0, 3.0, 2.5)] {
            let p = GreensParams::new(Interval::new(a, b).unwrap(), Order::new(mu).unwrap()).unwrap();
            let check = p.norm() * p.gamma_mu() * p.log_len().powf(mu - 1.0);
            assert!((check - 1.0).abs() < 1e-14);
        }
        assert!(GreensParams::new(Interval::new(1.0, 2.0).unwrap(), Order::new(3.5).unwrap()).is_err());
    }

    #[test]
    fn matches_naive_formula() {
        let (a, b, mu) = (0.5, 7.3, 2.37);
        let p = GreensParams::new(Interval::new(a, b).unwrap(), Order::new(mu).unwrap()).unwrap();
        for i in 1..10 {
            for j in 1..10 {
                let t = a + (b - a) * i as f64 / 10.0;
                let tau = a + (b - a) * j as f64 / 10.0 + 0.013;
                let got = p.eval(t, tau).unwrap();
                let want = naive(a, b, mu, t, tau);
                assert!(
                    (got - want).abs() < 1e-13 * (1.0 + want.abs()),
                    "{t} {tau}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn vanishes_on_boundary() {
        let p = example();
        for k in 0..=20 {
            let tau = 1.0 + (E - 1.0) * k as f64 / 20.0;
            assert_eq!(p.eval(1.0, tau).unwrap(), 0.0);
            assert_eq!(p.eval(E, tau).unwrap(), 0.0);
        }
    }

    #[test]
    fn diagonal_value_at_half() {
        let p = example();
        let t = 0.5f64.exp();
        let want = p.norm() * 0.5f64.powf(1.9) * 0.5f64.powf(1.9);
        let got = p.eval(t, t).unwrap();
        assert!(((got - want) / want).abs() < 1e-14);
        // independent evaluation of the first branch at the same point
        let first = p.norm() * (0.5f64.powf(1.9) * 0.5f64.powf(1.9) - 0.0);
        assert!(((got - first) / first).abs() < 1e-14);
    }

    #[test]
    fn continuity_across_diagonal() {
        let p = example();
        let iv = *p.interval();
        for k in 1..100 {
            let s = k as f64 / 100.0;
            let t = iv.coord_at_s(s);
            let lo = iv.coord_at_s(s - 1e-14);
            let hi = iv.coord_at_s(s + 1e-14);
            assert!((p.kernel(&t, &lo) - p.kernel(&t, &hi)).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_domain_is_error() {
        let p = example();
        assert!(p.eval(0.9, 1.5).is_err());
        assert!(p.eval(1.5, 3.0).is_err());
    }

    #[test]
    fn envelope_endpoints_and_argmax() {
        let p = GreensParams::new(Interval::new(0.5, 7.3).unwrap(), Order::new(2.4).unwrap()).unwrap();
        let iv = *p.interval();
        for t in [0.5, 7.3] {
            assert_eq!(p.envelope_u(t).unwrap(), 0.0);
            assert_eq!(p.envelope_v(t).unwrap(), 0.0);
        }
        // dense-grid argmax of u in s against s* = L(μ-1)/μ
        let l = iv.log_len();
        let n = 200_000;
        let (mut best_s, mut best) = (0.0, f64::NEG_INFINITY);
        for i in 0..=n {
            let s = l * i as f64 / n as f64;
            let u = p.u(&iv.coord_at_s(s));
            if u > best {
                best = u;
                best_s = s;
            }
        }
        let s_star = l * 1.4 / 2.4;
        assert!((best_s - s_star).abs() < 2.0 * l / n as f64);
    }

    #[test]
    fn w_equals_u_on_unit_log_length() {
        let p = example();
        for k in 0..=10 {
            let t = 1.0 + (E - 1.0) * k as f64 / 10.0;
            assert_eq!(p.envelope_w(t).unwrap(), p.envelope_u(t).unwrap());
        }
    }

    #[test]
    fn certification_example_passes() {
        let r = certify_bounds(&example(), 100).unwrap();
        assert!(r.passed(), "{r}");
        // corner t = τ = a is on the grid: (iii) slack is exactly 0 there
        assert!(r.bounds[2].min_slack <= 0.0);
    }

    #[test]
    fn certification_rejects_tiny_grid() {
        assert!(certify_bounds(&example(), 1).is_err());
    }

    #[test]
    fn row_integral_closed_form() {
        let p = example();
        let t = 0.5f64.exp();
        let want = 0.5f64.powf(1.9) * 0.5 / gamma(3.9);
        let got = p.row_integral(t, &QuadratureConfig::default()).unwrap();
        assert!(((got - want) / want).abs() < 1e-10);
        assert_eq!(p.row_integral(1.0, &QuadratureConfig::default()).unwrap(), 0.0);
        assert!(p.row_integral(E, &QuadratureConfig::default()).unwrap().abs() < 1e-300);
    }
}
