//! Hadamard integral and derivative of `(ln t)^p` on `(1, 3)` against their
//! Gamma-ratio closed forms, plus the homogeneous solutions of `HD^μ x = 0`.

use hadamard_bvp::frac::{hadamard_derivative, hadamard_integral, homogeneous_basis};
use hadamard_bvp::special::gamma;
use hadamard_bvp::{Interval, Order, QuadratureConfig};

fn main() -> hadamard_bvp::Result<()> {
    let iv = Interval::new(1.0, 3.0)?;
    let quad = QuadratureConfig::default();
    let mu = Order::new(2.5)?;
    let p = 3.5;
    let x = |t: f64| t.ln().max(0.0).powf(p);

    println!(
        "{:>6} {:>22} {:>22} {:>22} {:>22}",
        "t", "HI^mu x", "closed form", "HD^mu x", "closed form"
    );
    for t in [1.5f64, 2.0, 2.5, 2.9] {
        let s = t.ln();
        let integral = hadamard_integral(x, mu, &iv, t, &quad)?;
        let derivative = hadamard_derivative(x, mu, &iv, t, &quad)?;
        let want_i = gamma(p + 1.0) / gamma(p + 1.0 + mu.value()) * s.powf(p + mu.value());
        let want_d = gamma(p + 1.0) / gamma(p + 1.0 - mu.value()) * s.powf(p - mu.value());
        println!("{t:>6} {integral:>22.15e} {want_i:>22.15e} {derivative:>22.15e} {want_d:>22.15e}");
    }

    println!("\nhomogeneous solutions (ln(t/a))^(mu-k):");
    for term in homogeneous_basis(mu, &iv)? {
        println!("  k = {}: value at t = 2 is {:.6}", term.k, term.eval(2.0));
    }
    Ok(())
}
