//! Gamma-function helpers.

use statrs::function::gamma as sg;

/// Γ(x) for real `x`.
pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// Euler beta function B(p, q) = Γ(p)Γ(q)/Γ(p+q), via log-gamma for range.
pub fn beta(p: f64, q: f64) -> f64 {
    (ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp()
}

/// `x^p` for `x >= 0`, with `0^p = 0` for `p > 0`, `1` for `p = 0` and `+∞`
/// for `p < 0`.
#[inline]
pub fn pow_nonneg(x: f64, p: f64) -> f64 {
    if x > 0.0 {
        x.powf(p)
    } else if p > 0.0 {
        0.0
    } else if p == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}
