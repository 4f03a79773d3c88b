//! Full pipeline on the bundled example problem file: load, check, solve,
//! verify the residual and print a few solution values.

use std::path::Path;

use hadamard_bvp::cli::load_problem;
use hadamard_bvp::conditions::check_all;
use hadamard_bvp::solver::solve;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HBVP_LOG", "info")).init();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems/example.problem");
    let loaded = load_problem(&path)?;
    let conditions = check_all(&loaded.problem, &loaded.quadrature)?;
    if !conditions.all_ok() {
        println!("{conditions}");
        return Err("conditions fail".into());
    }
    let report = solve(&loaded.problem, &loaded.solver, &conditions, &loaded.quadrature)?;
    println!("{report}");
    for t in [1.2, 1.5, 2.0, 2.5] {
        println!("x({t}) = {:.12}", report.solution.eval(t)?);
    }
    Ok(())
}
