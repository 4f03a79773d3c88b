//! Tanh-sinh quadrature on integrands with endpoint singularities, written in
//! log-coordinates so that both endpoint distances are available exactly.

use std::f64::consts::E;

use hadamard_bvp::quadrature::{integrate_log_coords, integrate_plain_coords};
use hadamard_bvp::special::beta;
use hadamard_bvp::{Interval, QuadratureConfig};

fn main() -> hadamard_bvp::Result<()> {
    let quad = QuadratureConfig::default();
    let iv = Interval::new(1.0, E)?;

    // ∫ s^(p-1) (L-s)^(q-1) ds = L^(p+q-1) B(p, q)
    for (p, q) in [(0.5, 0.5), (0.05, 1.0), (1.9, 0.25)] {
        let r = integrate_log_coords(&iv, |c| c.s.powf(p - 1.0) * c.sc.powf(q - 1.0), &quad)?;
        println!(
            "B({p}, {q}): {:.16e} (exact {:.16e}, estimate {:.1e}, levels {}, converged {})",
            r.value,
            beta(p, q),
            r.error_estimate,
            r.levels_used,
            r.converged
        );
    }

    let r = integrate_plain_coords(&iv, |c| 1.0 / (c.s * c.sc).sqrt(), &quad)?;
    println!("∫ dt / sqrt(ln t ln(e/t)) over (1, e) = {:.16e}", r.value);

    let r = integrate_log_coords(&iv, |c| 1.0 / c.s, &quad);
    match r {
        Ok(r) => println!("∫ ds / s: converged = {} (value {:.3e})", r.converged, r.value),
        Err(e) => println!("∫ ds / s: {e}"),
    }
    Ok(())
}
