//! Hadamard fractional operators on `[a, b] ⊂ (0, ∞)`.
//!
//! Everything is computed in the log-coordinate `s = ln(t/a)`: the Hadamard
//! kernel `(ln(t/τ))^{μ-1} dτ/τ` turns into the Riemann–Liouville kernel
//! `(s - σ)^{μ-1} dσ`, and the scaled derivative `t d/dt` into `d/ds`.
//!
//! Callers of [`hadamard_derivative`] are responsible for the regularity the
//! operator presumes (`t^{n-1} x^{(n-1)}` absolutely continuous); it is not
//! checked.

use crate::error::{Error, Result};
use crate::quadrature::{tanh_sinh, tanh_sinh_fixed, QuadratureConfig, MAX_LEVEL};
use crate::special::{gamma, pow_nonneg};

/// A compact interval `[a, b]` with `0 < a < b < ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
    log_len: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!(
                "interval endpoints must be finite (a = {a}, b = {b})"
            )));
        }
        if a <= 0.0 {
            return Err(Error::domain(format!("interval requires a > 0, got a = {a}")));
        }
        if a >= b {
            return Err(Error::domain(format!("interval requires a < b, got a = {a}, b = {b}")));
        }
        let log_len = (b / a).ln();
        if !(log_len > 0.0 && log_len.is_finite()) {
            return Err(Error::domain(format!(
                "ln(b/a) is not finite and positive for a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b, log_len })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `L = ln(b/a)`.
    pub fn log_len(&self) -> f64 {
        self.log_len
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }

    /// Log-coordinates of a point given in the original variable.
    pub fn coord(&self, t: f64) -> Result<LogCoord> {
        if !self.contains(t) {
            return Err(Error::domain(format!("t = {t} is outside [{}, {}]", self.a, self.b)));
        }
        let s = (t / self.a).ln().clamp(0.0, self.log_len);
        let sc = (self.b / t).ln().clamp(0.0, self.log_len);
        Ok(LogCoord { t, s, sc })
    }

    /// Log-coordinates of `s ∈ [0, L]`.
    pub fn coord_at_s(&self, s: f64) -> LogCoord {
        let s = s.clamp(0.0, self.log_len);
        self.coord_from_parts(s, self.log_len - s)
    }

    /// Builds a coordinate from independently accurate `s = ln(t/a)` and
    /// `sc = ln(b/t)`.
    pub fn coord_from_parts(&self, s: f64, sc: f64) -> LogCoord {
        let t = if s <= sc {
            self.a * s.exp()
        } else {
            self.b * (-sc).exp()
        };
        LogCoord { t, s, sc }
    }
}

/// A point of `[a, b]` carried together with both of its log-distances to the
/// endpoints. `s + sc = L` up to rounding, but each is accurate on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoord {
    pub t: f64,
    /// `ln(t/a)`
    pub s: f64,
    /// `ln(b/t)`
    pub sc: f64,
}

/// Fractional order `μ > 0` (non-integer for the derivative).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!("order must be positive and finite, got {mu}")));
        }
        Ok(Self(mu))
    }

    /// An order admissible for the boundary value problem, `2 < μ < 3`.
    pub fn for_bvp(mu: f64) -> Result<Self> {
        if !(mu > 2.0 && mu < 3.0) {
            return Err(Error::domain(format!("order mu must satisfy 2 < mu < 3, got {mu}")));
        }
        Ok(Self(mu))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `n = ⌈μ⌉`.
    pub fn ceil(&self) -> u32 {
        self.0.ceil() as u32
    }
}

/// Hadamard left integral `(1/Γ(μ)) ∫_a^t (ln(t/τ))^{μ-1} x(τ) dτ/τ`.
pub fn hadamard_integral<F>(x: F, mu: Order, interval: &Interval, t: f64, quad: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let st = interval.coord(t)?.s;
    if st == 0.0 {
        return Ok(0.0);
    }
    let m = mu.value();
    let a = interval.a();
    let r = tanh_sinh(st, |p, q| pow_nonneg(q, m - 1.0) * x(point(a, t, p, q)), quad)?;
    Ok(r.require_converged()? / gamma(m))
}

/// [`hadamard_integral`] evaluated with a fixed tanh-sinh level.
pub fn hadamard_integral_at_level<F>(x: F, mu: Order, interval: &Interval, t: f64, level: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let st = interval.coord(t)?.s;
    if st == 0.0 {
        return Ok(0.0);
    }
    let m = mu.value();
    let a = interval.a();
    let v = tanh_sinh_fixed(st, |p, q| pow_nonneg(q, m - 1.0) * x(point(a, t, p, q)), level)?;
    Ok(v / gamma(m))
}

/// `τ` at distance `p` (in s) from `a` and `q` from `t`.
#[inline]
fn point(a: f64, t: f64, p: f64, q: f64) -> f64 {
    if p <= q {
        a * p.exp()
    } else {
        t * (-q).exp()
    }
}

/// Riemann–Liouville-type inner integral of the derivative in log-coordinates:
/// `J(s) = (1/Γ(β)) ∫_0^s (s - σ)^{β-1} x(a e^σ) dσ` with `β = n - μ`,
/// rescaled to `s^β/Γ(β) ∫_0^1 (1 - r)^{β-1} x(a e^{s r}) dr` so that a fixed
/// node set yields a smooth function of `s`.
struct InnerIntegral<'a, F> {
    x: &'a F,
    beta: f64,
    gamma_beta: f64,
    level: usize,
}

impl<F: Fn(f64) -> f64> InnerIntegral<'_, F> {
    fn eval(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let v = tanh_sinh_fixed(
            1.0,
            |r, rc| pow_nonneg(rc, self.beta - 1.0) * (self.x)(s * r),
            self.level,
        )?;
        Ok(pow_nonneg(s, self.beta) * v / self.gamma_beta)
    }
}

/// Hadamard left derivative of non-integer order `μ` at `t ∈ (a, b)`.
///
/// The outer `(t d/dt)^n` is applied as `d^n/ds^n` to the inner integral by
/// central differences with Ridders–Neville extrapolation. The stencil stays
/// inside `(a, b]`, so `x` is only sampled on the interval.
pub fn hadamard_derivative<F>(x: F, mu: Order, interval: &Interval, t: f64, quad: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let st = stencil_center(interval, interval.coord(t)?.s)?;
    let a = interval.a();
    derivative_adaptive(&|s: f64| x(a * s.exp()), mu, interval, st, quad)
}

/// [`hadamard_derivative`] for `x` given as a function of `s = ln(t/a)`,
/// evaluated at `s`. Functions singular at `t = a` keep full relative
/// accuracy this way.
pub fn hadamard_derivative_log<F>(x: F, mu: Order, interval: &Interval, s: f64, quad: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let st = stencil_center(interval, s)?;
    derivative_adaptive(&x, mu, interval, st, quad)
}

fn derivative_adaptive<F: Fn(f64) -> f64>(
    xs: &F,
    mu: Order,
    interval: &Interval,
    st: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let (n, beta) = derivative_split(mu)?;
    let probe = tanh_sinh(1.0, |r, rc| pow_nonneg(rc, beta - 1.0) * xs(st * r), quad)?;
    if !probe.converged && !(probe.error_estimate <= PROBE_ACCEPT_TOL * probe.value.abs()) {
        probe.require_converged()?;
    }
    let level = (probe.levels_used + 1).clamp(6, MAX_LEVEL);
    derivative_with(xs, n, beta, interval, st, level)
}

/// [`hadamard_derivative`] with the inner quadrature pinned to `level`.
pub fn hadamard_derivative_at_level<F>(x: F, mu: Order, interval: &Interval, t: f64, level: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (n, beta) = derivative_split(mu)?;
    let st = stencil_center(interval, interval.coord(t)?.s)?;
    let a = interval.a();
    derivative_with(&|s: f64| x(a * s.exp()), n, beta, interval, st, level.min(MAX_LEVEL))
}

/// Fixed-step variant of [`hadamard_derivative`]: one central difference of
/// step `h` (in `s`) on a pinned quadrature level, hence exactly linear in `x`
/// up to rounding.
pub fn hadamard_derivative_fixed_step<F>(
    x: F,
    mu: Order,
    interval: &Interval,
    t: f64,
    level: usize,
    h: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (n, beta) = derivative_split(mu)?;
    let st = stencil_center(interval, interval.coord(t)?.s)?;
    let gap = st.min(interval.log_len() - st);
    if !(h > 0.0 && n as f64 * h / 2.0 < gap) {
        return Err(Error::domain(format!(
            "step h = {h} does not fit the stencil at s = {st}"
        )));
    }
    let a = interval.a();
    let xs = |s: f64| x(a * s.exp());
    let inner = InnerIntegral {
        x: &xs,
        beta,
        gamma_beta: gamma(beta),
        level: level.min(MAX_LEVEL),
    };
    central_difference(&inner, n, st, h)
}

fn derivative_split(mu: Order) -> Result<(u32, f64)> {
    let m = mu.value();
    if m.fract() == 0.0 {
        return Err(Error::domain(format!(
            "Hadamard derivative needs a non-integer order, got {m}"
        )));
    }
    let n = mu.ceil();
    Ok((n, n as f64 - m))
}

/// Smallest admissible distance (relative to `L`) between `t` and an
/// endpoint for the difference stencil.
const MIN_STENCIL_GAP: f64 = 1e-6;

/// A level probe that misses the quadrature tolerance is still good enough to
/// size the inner rule when its relative error estimate is below this.
const PROBE_ACCEPT_TOL: f64 = 1e-6;

fn stencil_center(interval: &Interval, s: f64) -> Result<f64> {
    let gap = s.min(interval.log_len() - s);
    if !(gap >= MIN_STENCIL_GAP * interval.log_len()) {
        return Err(Error::domain(format!(
            "s = {s} is too close to an endpoint for the difference stencil (log-gap {gap:e})"
        )));
    }
    Ok(s)
}

fn derivative_with<F: Fn(f64) -> f64>(
    x: &F,
    n: u32,
    beta: f64,
    interval: &Interval,
    st: f64,
    level: usize,
) -> Result<f64> {
    let inner = InnerIntegral {
        x,
        beta,
        gamma_beta: gamma(beta),
        level,
    };
    let gap = st.min(interval.log_len() - st);
    // Stencil reach is n·h/2; keep it inside 90% of the gap.
    let h0 = 1.8 * gap / n as f64;
    let diff = |h: f64| central_difference(&inner, n, st, h);
    Ok(ridders(diff, h0)?.0)
}

/// `δ_h^n J(s) / h^n` with half-integer offsets; the error expands in even
/// powers of `h`.
fn central_difference<F: Fn(f64) -> f64>(inner: &InnerIntegral<'_, F>, n: u32, s: f64, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        let offset = (n as f64 / 2.0 - k as f64) * h;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * inner.eval(s + offset)?;
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    Ok(acc / h.powi(n as i32))
}

/// Ridders' polynomial extrapolation of a step-size dependent estimate with
/// an even-power error series. Returns (estimate, error estimate).
fn ridders<D>(diff: D, h0: f64) -> Result<(f64, f64)>
where
    D: Fn(f64) -> Result<f64>,
{
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    const SAFE: f64 = 2.0;

    let mut table = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    table[0][0] = diff(h)?;
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        table[0][i] = diff(h)?;
        let mut fac = CON2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let errt = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if errt <= err {
                err = errt;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok((best, err))
}

/// One of the three functions `t ↦ (ln(t/a))^{μ-k}` spanning the solutions of
/// `HD^μ x = 0` for `2 < μ < 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousTerm {
    pub k: u32,
    pub exponent: f64,
    interval: Interval,
}

impl HomogeneousTerm {
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_log((t / self.interval.a()).ln().max(0.0))
    }

    /// Value at `s = ln(t/a)`.
    pub fn eval_log(&self, s: f64) -> f64 {
        pow_nonneg(s, self.exponent)
    }
}

pub fn homogeneous_basis(mu: Order, interval: &Interval) -> Result<[HomogeneousTerm; 3]> {
    let mu = Order::for_bvp(mu.value())?;
    Ok([1, 2, 3].map(|k| HomogeneousTerm {
        k,
        exponent: mu.value() - k as f64,
        interval: *interval,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn interval() -> Interval {
        Interval::new(1.0, std::f64::consts::E).unwrap()
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(0.0, 1.0).is_err());
        assert!(Interval::new(-1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 2.0).is_err());
        assert!(Interval::new(3.0, 2.0).is_err());
        assert!(Interval::new(1.0, f64::INFINITY).is_err());
        let i = Interval::new(2.0, 2.0 * 3f64.exp()).unwrap();
        assert!((i.log_len() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_coordinate_round_trip() {
        let i = Interval::new(0.5, 7.3).unwrap();
        for k in 0..=20 {
            let s = i.log_len() * k as f64 / 20.0;
            let c = i.coord_at_s(s);
            let back = i.coord(c.t).unwrap();
            assert!((back.s - s).abs() < 1e-14);
            assert!((c.s + c.sc - i.log_len()).abs() < 1e-15);
        }
    }

    #[test]
    fn order_validation() {
        assert!(Order::new(0.0).is_err());
        assert!(Order::for_bvp(3.5).is_err());
        assert!(Order::for_bvp(2.0).is_err());
        assert_eq!(Order::for_bvp(2.5).unwrap().ceil(), 3);
    }

    #[test]
    fn integral_of_one_with_unit_order_is_log() {
        let i = interval();
        let q = QuadratureConfig::default();
        for &t in &[1.3, 2.0, 2.7] {
            let v = hadamard_integral(|_| 1.0, Order::new(1.0).unwrap(), &i, t, &q).unwrap();
            assert!((v - t.ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn integral_at_left_endpoint_is_zero() {
        let i = interval();
        let v = hadamard_integral(
            |t| t * t,
            Order::new(2.5).unwrap(),
            &i,
            1.0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn derivative_of_zero_is_zero() {
        let i = interval();
        let v = hadamard_derivative(|_| 0.0, Order::new(2.4).unwrap(), &i, 1.8, &QuadratureConfig::default()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn derivative_near_endpoint_is_domain_error() {
        let i = interval();
        let q = QuadratureConfig::default();
        let err = hadamard_derivative(|t: f64| t.ln(), Order::new(2.4).unwrap(), &i, 1.0 + 1e-9, &q);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_rejects_integer_order() {
        let i = interval();
        let q = QuadratureConfig::default();
        assert!(hadamard_derivative(|t: f64| t, Order::new(2.0).unwrap(), &i, 1.5, &q).is_err());
    }

    #[test]
    fn derivative_low_orders_of_monomial() {
        // μ in (0,1) and (1,2): HD^μ s^p = Γ(p+1)/Γ(p+1-μ) s^{p-μ}
        let i = interval();
        let q = QuadratureConfig::default();
        for &(mu, p) in &[(0.5, 1.5), (1.3, 2.0), (1.7, 3.25)] {
            let t = 1.9f64;
            let s = t.ln();
            let got = hadamard_derivative(|tau: f64| tau.ln().powf(p), Order::new(mu).unwrap(), &i, t, &q).unwrap();
            let want = gamma(p + 1.0) / gamma(p + 1.0 - mu) * s.powf(p - mu);
            assert!(((got - want) / want).abs() < 1e-7, "mu={mu} p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn basis_values() {
        let i = Interval::new(2.0, 2.0 * 1.5f64.exp()).unwrap();
        let mu = Order::for_bvp(2.5).unwrap();
        let basis = homogeneous_basis(mu, &i).unwrap();
        assert!((basis[0].eval(i.b()) - 1.5f64.powf(1.5)).abs() < 1e-13);
        assert_eq!(basis[0].eval(2.0), 0.0);
        assert_eq!(basis[1].eval(2.0), 0.0);
        assert_eq!(basis[2].eval(2.0), f64::INFINITY);
        assert!(basis[2].eval(2.0 + 1e-12) > 1e5);
    }
}
