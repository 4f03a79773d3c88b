use hadamard_bvp::frac::{
    hadamard_derivative, hadamard_derivative_at_level, hadamard_derivative_fixed_step, hadamard_derivative_log,
    hadamard_integral, hadamard_integral_at_level, homogeneous_basis,
};
use hadamard_bvp::special::gamma;
use hadamard_bvp::{Interval, Order, QuadratureConfig};
use proptest::prelude::*;

fn monomial(a: f64, p: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| (t / a).ln().max(0.0).powf(p)
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

#[test]
fn integral_of_monomial_matches_beta_form() {
    let quad = QuadratureConfig::default();
    let iv = Interval::new(0.7, 4.0).unwrap();
    for &mu in &[0.4, 1.0, 2.5, 3.7] {
        for &p in &[0.0, 0.5, 1.9, 4.0] {
            for &t in &[0.9, 2.0, 3.9] {
                let s = (t / 0.7f64).ln();
                let want = gamma(p + 1.0) / gamma(p + 1.0 + mu) * s.powf(p + mu);
                let got = hadamard_integral(monomial(0.7, p), Order::new(mu).unwrap(), &iv, t, &quad).unwrap();
                assert!(rel(got, want) < 1e-11, "mu {mu} p {p} t {t}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn integral_at_left_endpoint_vanishes() {
    let iv = Interval::new(2.0, 5.0).unwrap();
    let v = hadamard_integral(
        |_| 7.0,
        Order::new(2.5).unwrap(),
        &iv,
        2.0,
        &QuadratureConfig::default(),
    )
    .unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn semigroup_on_monomials() {
    let quad = QuadratureConfig::default();
    let a = 1.5;
    let iv = Interval::new(a, 6.0).unwrap();
    for &(m1, m2, p) in &[(0.5, 0.7, 1.0), (1.3, 0.9, 0.5), (2.2, 0.6, 2.0)] {
        let (o1, o2) = (Order::new(m1).unwrap(), Order::new(m2).unwrap());
        let inner = |tau: f64| hadamard_integral(monomial(a, p), o2, &iv, tau, &quad).unwrap();
        for &t in &[2.0, 4.0, 5.9] {
            let nested = hadamard_integral(inner, o1, &iv, t, &quad).unwrap();
            let direct = hadamard_integral(monomial(a, p), Order::new(m1 + m2).unwrap(), &iv, t, &quad).unwrap();
            assert!(
                rel(nested, direct) < 1e-8,
                "({m1}, {m2}, {p}) at {t}: {nested} vs {direct}"
            );
        }
    }
}

#[test]
fn derivative_is_left_inverse_of_integral() {
    let quad = QuadratureConfig::default();
    let a = 1.0;
    let iv = Interval::new(a, 3.0).unwrap();
    let x = |t: f64| 1.0 + (t / a).ln() + 0.5 * (t / a).ln().powi(2);
    for &mu in &[2.2, 2.5, 2.9] {
        let o = Order::new(mu).unwrap();
        let ix = |t: f64| hadamard_integral(x, o, &iv, t, &quad).unwrap();
        for &t in &[1.4, 2.0, 2.6] {
            let back = hadamard_derivative(ix, o, &iv, t, &quad).unwrap();
            assert!(rel(back, x(t)) < 1e-6, "mu {mu} t {t}: {back} vs {}", x(t));
        }
    }
}

#[test]
fn homogeneous_basis_is_annihilated() {
    let quad = QuadratureConfig::default();
    for &(a, b, mu) in &[(1.0, std::f64::consts::E, 2.9), (0.5, 3.0, 2.3), (2.0, 9.0, 2.6)] {
        let iv = Interval::new(a, b).unwrap();
        let o = Order::new(mu).unwrap();
        for term in homogeneous_basis(o, &iv).unwrap() {
            for k in 1..10 {
                let s = iv.log_len() * k as f64 / 10.0;
                let d = hadamard_derivative_log(|s| term.eval_log(s), o, &iv, s, &quad).unwrap();
                assert!(d.abs() <= 1e-6, "k = {} at s = {s}: {d}", term.k);
            }
        }
    }
}

#[test]
fn homogeneous_basis_values() {
    let iv = Interval::new(1.0, 5.0).unwrap();
    let basis = homogeneous_basis(Order::new(2.5).unwrap(), &iv).unwrap();
    let l = iv.log_len();
    assert!(rel(basis[0].eval(5.0), l.powf(1.5)) < 1e-15);
    assert_eq!(basis[0].eval(1.0), 0.0);
    assert_eq!(basis[1].eval(1.0), 0.0);
    assert_eq!(basis[2].eval(1.0), f64::INFINITY);
    assert!(homogeneous_basis(Order::new(3.5).unwrap(), &iv).is_err());
}

#[test]
fn derivative_of_zero() {
    let iv = Interval::new(1.0, 2.0).unwrap();
    let d = hadamard_derivative(
        |_| 0.0,
        Order::new(2.5).unwrap(),
        &iv,
        1.5,
        &QuadratureConfig::default(),
    )
    .unwrap();
    assert_eq!(d, 0.0);
}

#[test]
fn linearity_on_fixed_nodes() {
    let iv = Interval::new(1.0, 4.0).unwrap();
    let o = Order::new(2.7).unwrap();
    let x = |t: f64| (t.ln() + 1.0).sqrt();
    let y = |t: f64| t.ln().powf(2.2);
    let (alpha, beta) = (1.75, -0.4);
    for &t in &[1.5, 2.0, 2.5] {
        let level = 8;
        let lhs = hadamard_integral_at_level(|t| alpha * x(t) + beta * y(t), o, &iv, t, level).unwrap();
        let rhs = alpha * hadamard_integral_at_level(x, o, &iv, t, level).unwrap()
            + beta * hadamard_integral_at_level(y, o, &iv, t, level).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "integral at {t}");
        let h = 0.25;
        let d = |g: &dyn Fn(f64) -> f64| hadamard_derivative_fixed_step(g, o, &iv, t, level, h).unwrap();
        let lhs = d(&|t| alpha * x(t) + beta * y(t));
        let rhs = alpha * d(&x) + beta * d(&y);
        assert!(
            (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
            "derivative at {t}: {lhs} vs {rhs}"
        );
        // the extrapolated derivative is linear to its own accuracy
        let e = |g: &dyn Fn(f64) -> f64| hadamard_derivative_at_level(g, o, &iv, t, level).unwrap();
        let lhs = e(&|t| alpha * x(t) + beta * y(t));
        let rhs = alpha * e(&x) + beta * e(&y);
        assert!(
            (lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1.0),
            "extrapolated derivative at {t}: {lhs} vs {rhs}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivative_of_power_matches_closed_form(mu in 2.01f64..2.99, p in 3.0f64..5.0, frac in 0.1f64..0.9) {
        let quad = QuadratureConfig::default();
        let iv = Interval::new(1.0, 3.0).unwrap();
        let t = (iv.log_len() * frac).exp();
        let s = t.ln();
        let want = gamma(p + 1.0) / gamma(p + 1.0 - mu) * s.powf(p - mu);
        let got = hadamard_derivative(monomial(1.0, p), Order::new(mu).unwrap(), &iv, t, &quad).unwrap();
        prop_assert!(rel(got, want) < 1e-6, "{} vs {}", got, want);
    }

    #[test]
    fn log_coordinates_round_trip(a in 0.01f64..10.0, l in 0.01f64..5.0, frac in 0.0f64..=1.0) {
        let iv = Interval::new(a, a * l.exp()).unwrap();
        let c = iv.coord_at_s(iv.log_len() * frac);
        let back = iv.coord(c.t).unwrap();
        prop_assert!((back.s - c.s).abs() <= 4.0 * f64::EPSILON * (1.0 + c.s));
        prop_assert!((c.s + c.sc - iv.log_len()).abs() <= 4.0 * f64::EPSILON * iv.log_len());
        prop_assert!(((a * c.s.exp() - c.t) / c.t).abs() <= 4.0 * f64::EPSILON);
    }
}
