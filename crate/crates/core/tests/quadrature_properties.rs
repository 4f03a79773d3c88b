use std::f64::consts::{E, PI};

use hadamard_bvp::quadrature::{
    integrate_log_coords, integrate_log_measure, integrate_plain, integrate_plain_coords, tanh_sinh,
};
use hadamard_bvp::{Interval, QuadratureConfig};
use proptest::prelude::*;

fn beta_target(mu: f64, l: f64) -> f64 {
    l.powf(mu + 1.0) / (mu * (mu + 1.0))
}

/// `∫_0^1 g(s) ds` by the midpoint rule after `s = (1 − cos πθ)/2`.
fn graded_midpoint(g: impl Fn(f64, f64) -> f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            let th = (k as f64 + 0.5) * h;
            let s = 0.5 * (1.0 - (PI * th).cos());
            let sc = 0.5 * (1.0 + (PI * th).cos());
            g(s, sc) * 0.5 * PI * (PI * th).sin()
        })
        .sum::<f64>()
        * h
}

#[test]
fn constant_gives_log_length() {
    let iv = Interval::new(0.3, 7.0).unwrap();
    let r = integrate_log_measure(|_| 1.0, &iv, &QuadratureConfig::default()).unwrap();
    assert!(r.converged);
    assert!((r.value - iv.log_len()).abs() < 1e-14);
}

#[test]
fn plain_measure_examples() {
    let cfg = QuadratureConfig::default();
    let iv = Interval::new(1.0, E).unwrap();
    let r = integrate_plain(|_| 1.0, &iv, &cfg).unwrap();
    assert!((r.value - (E - 1.0)).abs() < 1e-13);

    let r = integrate_plain_coords(&iv, |c| 1.0 / (c.s * c.sc).sqrt(), &cfg).unwrap();
    assert!(r.converged);
    let sampled = integrate_plain(|t: f64| 1.0 / (t.ln() * (E / t).ln()).sqrt(), &iv, &cfg).unwrap();
    assert!(((sampled.value - r.value) / r.value).abs() < 1e-6);
    let brute = graded_midpoint(|s, sc| s.exp() / (s * sc).sqrt(), 1_000_000);
    assert!(((r.value - brute) / brute).abs() < 1e-9, "{} vs {brute}", r.value);
}

#[test]
fn non_integrable_is_flagged() {
    let iv = Interval::new(1.0, 3.0).unwrap();
    let r = integrate_log_coords(&iv, |c| 1.0 / c.s, &QuadratureConfig::default());
    assert!(r.map_or(true, |r| !r.converged));
}

#[test]
fn beta_integrals_match_midpoint_brute_force() {
    let cfg = QuadratureConfig::default();
    let (mu, l) = (2.37, 1.0f64);
    let iv = Interval::new(1.0, l.exp()).unwrap();
    let v = integrate_log_coords(&iv, |c| c.s * c.sc.powf(mu - 1.0), &cfg).unwrap();
    let brute = graded_midpoint(|s, sc| s * sc.powf(mu - 1.0), 1_000_000);
    assert!(((v.value - brute) / brute).abs() < 1e-10);
    assert!(((v.value - beta_target(mu, l)) / beta_target(mu, l)).abs() < 1e-12);
}

#[test]
fn error_estimates_shrink_with_levels() {
    let g = |p: f64, q: f64| (p - q).cos() * (1.0 + p * p).ln();
    let mut last = f64::INFINITY;
    for levels in 3..=7 {
        let cfg = QuadratureConfig {
            rel_tol: 1e-300,
            abs_tol: 1e-300,
            max_levels: levels,
        };
        let r = tanh_sinh(2.0, g, &cfg).unwrap();
        const FLOOR: f64 = 1e-14;
        assert!(
            r.error_estimate <= last.max(FLOOR),
            "level {levels}: {} > {last}",
            r.error_estimate
        );
        last = r.error_estimate;
    }
    assert!(last < 1e-12);
}

#[test]
fn converged_results_honour_tolerance() {
    let cfg = QuadratureConfig::default();
    let iv = Interval::new(2.0, 11.0).unwrap();
    let r = integrate_log_coords(&iv, |c| c.s.powf(-0.7) * c.sc.powf(0.4), &cfg).unwrap();
    assert!(r.converged);
    assert!(r.error_estimate <= (cfg.rel_tol * r.value.abs()).max(cfg.abs_tol));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn v_and_u_integrals_are_beta(mu in 2.0f64..3.0, l in 0.1f64..3.0) {
        let cfg = QuadratureConfig::default();
        let iv = Interval::new(1.0, l.exp()).unwrap();
        let want = beta_target(mu, l);
        let v = integrate_log_coords(&iv, |c| c.s * c.sc.powf(mu - 1.0), &cfg).unwrap();
        let u = integrate_log_coords(&iv, |c| c.s.powf(mu - 1.0) * c.sc, &cfg).unwrap();
        prop_assert!(((v.value - want) / want).abs() <= 1e-10);
        prop_assert!(((u.value - want) / want).abs() <= 1e-10);
    }

    #[test]
    fn log_measure_is_scale_invariant(a in 0.1f64..5.0, l in 0.1f64..3.0, c in 0.01f64..100.0) {
        let cfg = QuadratureConfig::default();
        let b = a * l.exp();
        let g = |tau: f64| (tau / a).ln().max(0.0).sqrt() * (1.0 + tau).recip();
        let base = integrate_log_measure(g, &Interval::new(a, b).unwrap(), &cfg).unwrap().value;
        let scaled = integrate_log_measure(|tau| g(c * tau), &Interval::new(a / c, b / c).unwrap(), &cfg).unwrap().value;
        prop_assert!((base - scaled).abs() <= 1e-12 * base.abs().max(1.0), "{} vs {}", base, scaled);
    }
}
