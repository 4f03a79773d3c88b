//! Admissibility checks for the example problem, the selected constants and the
//! largest admissible multiplicative factor.

use std::collections::BTreeMap;
use std::f64::consts::E;

use hadamard_bvp::conditions::{check_all, lambda_max, Problem};
use hadamard_bvp::expr::{parse_with_params, Nonlinearity};
use hadamard_bvp::{Interval, Order, QuadratureConfig};

const F: &str = "lambda / ((ln(t))^1.9 * ln(2.718281828459045/t))^0.25 * (sqrt(x) + 2/x^0.25)";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let quad = QuadratureConfig::default();
    let ast = parse_with_params(F, &["lambda"])?;
    let f = Nonlinearity::new(
        ast,
        BTreeMap::from([("lambda".to_string(), 1.0)]),
        Interval::new(1.0, E)?,
    )?;
    let problem = Problem::new(f, Order::new(2.9)?, None, None)?;
    println!(
        "located rho = {:.9}, vartheta = {:.11} (ln vartheta = {:.11})",
        problem.rho(),
        problem.vartheta(),
        problem.vartheta().ln()
    );

    let lm = lambda_max(&problem, "lambda", &quad)?;
    println!("lambda_max = {:.15} at kappa = {:.9}", lm.value, lm.kappa_star);

    for factor in [0.5, 2.0] {
        let scaled = problem.with_nonlinearity(problem.f().with_param("lambda", factor * lm.value)?)?;
        let report = check_all(&scaled, &quad)?;
        println!("\nlambda = {factor} lambda_max:\n{report}");
    }
    Ok(())
}
