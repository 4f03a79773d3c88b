//! Green's function of the linear problem: values, the row integral identity
//! and grid certification of the four envelope bounds.

use std::f64::consts::E;

use hadamard_bvp::greens::{certify_bounds, GreensParams};
use hadamard_bvp::special::gamma;
use hadamard_bvp::{Interval, Order, QuadratureConfig};

fn main() -> hadamard_bvp::Result<()> {
    let g = GreensParams::new(Interval::new(1.0, E)?, Order::new(2.9)?)?;
    let quad = QuadratureConfig::default();

    let mid = 0.5f64.exp();
    println!("G(sqrt e, sqrt e) = {:.16e}", g.eval(mid, mid)?);
    for t in [1.2, mid, 2.5] {
        let row = g.row_integral(t, &quad)?;
        let want = g.envelope_u(t)? / gamma(3.9);
        println!("∫ G({t:.4}, τ) dτ/τ = {row:.16e}, u(t)/Γ(μ+1) = {want:.16e}");
    }

    for (a, b, mu) in [(1.0, E, 2.9), (0.5, 7.3, 2.05), (0.5, 7.3, 2.95)] {
        let p = GreensParams::new(Interval::new(a, b)?, Order::new(mu)?)?;
        let report = certify_bounds(&p, 200)?;
        let slacks: Vec<String> = report
            .bounds
            .iter()
            .map(|b| format!("{}: {:.2e}", b.name, b.min_slack))
            .collect();
        println!(
            "a = {a}, b = {b}, mu = {mu}: {} [{}]",
            if report.passed() { "pass" } else { "FAIL" },
            slacks.join(", ")
        );
    }
    Ok(())
}
