//! `HD^μ x + y = 0` with the three boundary conditions, solved by applying the
//! Green's function to `y ≡ 1` and compared with `u(t)/Γ(μ+1)`.

use hadamard_bvp::greens::GreensParams;
use hadamard_bvp::solver::solve_linear;
use hadamard_bvp::special::gamma;
use hadamard_bvp::{Interval, Order, QuadratureConfig};

fn main() -> hadamard_bvp::Result<()> {
    let mu = 2.5;
    let g = GreensParams::new(Interval::new(2.0, 6.0)?, Order::new(mu)?)?;
    let x = solve_linear(&g, |_| 1.0, 65, &QuadratureConfig::default())?;

    let mut worst = 0.0f64;
    for (c, v) in x.nodes().iter().zip(x.values()) {
        worst = worst.max((v - g.u(c) / gamma(mu + 1.0)).abs());
    }
    println!("nodes: {}, max |x - u/Γ(μ+1)| = {worst:.2e}", x.len());
    for t in [2.5, 3.5, 5.0] {
        println!("x({t}) = {:.12}", x.eval(t)?);
    }
    Ok(())
}
