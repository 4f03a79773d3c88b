//! Parsing, printing and evaluating nonlinearities `f(t, x)`.

use std::collections::BTreeMap;

use hadamard_bvp::expr::{parse, parse_with_params, Nonlinearity};
use hadamard_bvp::Interval;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for src in ["-x^2", "2^-x^2", "1/x^0.25 + sqrt(x)", "(t - 1) * 3 / 4"] {
        println!("{src:<22} parses as {}", parse(src)?);
    }

    let src = "lambda / ((ln(t))^1.9 * ln(2.718281828459045/t))^0.25 * (sqrt(x) + 2/x^0.25)";
    let ast = parse_with_params(src, &["lambda"])?;
    let params = BTreeMap::from([("lambda".to_string(), 1.12)]);
    let f = Nonlinearity::new(ast, params, Interval::new(1.0, std::f64::consts::E)?)?;
    println!("f(e^0.5, 1) = {:.16e}", f.eval(0.5f64.exp(), 1.0)?);
    println!("f(e^0.5, 0) = {}", f.eval(0.5f64.exp(), 0.0)?);

    if let Some((lambda, g)) = f.factor_out("lambda") {
        println!(
            "lambda = {lambda}, remaining factor at (e^0.5, 1) = {:.16e}",
            g.eval(0.5f64.exp(), 1.0)?
        );
    }

    for bad in ["2 +", "x + y", "sin(x)"] {
        match parse_with_params(bad, &[]) {
            Ok(e) => println!("{bad:<8} -> {e}"),
            Err(e) => println!("{bad:<8} -> error: {e}"),
        }
    }
    Ok(())
}
