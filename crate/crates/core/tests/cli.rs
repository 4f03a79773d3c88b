use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems")
}

fn hbvp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbvp")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn report_value<'a>(stdout: &'a str, key: &str) -> Option<&'a str> {
    stdout.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

#[test]
fn malformed_inputs_exit_2_naming_the_key() {
    let expected: &[(&str, &str)] = &[
        ("a_negative", "`a`"),
        ("a_not_below_b", "`b`"),
        ("bad_damping", "solver.damping"),
        ("bad_max_levels", "`quadrature`"),
        ("bad_residual_tol", "`residual.interior`"),
        ("bad_schedule", "solver.n_schedule"),
        ("f_syntax", "`f`"),
        ("missing_f", "`f`"),
        ("mu_out_of_range", "`mu`"),
        ("mu_wrong_type", "mu ="),
        ("not_toml", "line 2"),
        ("rho_negative", "`rho`"),
        ("undeclared_param", "`lambda`"),
        ("unknown_key", "`lamda`"),
        ("unknown_solver_key", "`grid`"),
        ("unused_param", "`params.kappa`"),
        ("vartheta_outside", "`vartheta`"),
    ];
    let dir = problems().join("malformed");
    let on_disk = std::fs::read_dir(&dir).unwrap().count();
    assert_eq!(on_disk, expected.len(), "every fixture needs an expectation");
    for (name, key) in expected {
        let path = dir.join(format!("{name}.problem"));
        for cmd in ["check", "solve"] {
            let mut args = vec![cmd, path.to_str().unwrap()];
            if cmd == "solve" {
                args.extend(["--out", "/nonexistent/unused.csv"]);
            }
            let out = hbvp(&args);
            let err = text(&out.stderr);
            assert_eq!(code(&out), 2, "{cmd} {name}: {err}");
            assert!(err.contains(key), "{cmd} {name}: `{key}` not in {err}");
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&hbvp(&[])), 2);
    assert_eq!(code(&hbvp(&["frobnicate"])), 2);
    assert_eq!(code(&hbvp(&["check"])), 2);
    assert_eq!(code(&hbvp(&["check", "/nonexistent/file.problem"])), 2);
    assert_eq!(
        code(&hbvp(&["validate-green", "--a", "1", "--b", "e", "--mu", "2.9"])),
        2
    );
    assert_eq!(code(&hbvp(&["--help"])), 0);
}

#[test]
fn validate_green_cases() {
    let pass = hbvp(&[
        "validate-green",
        "--a",
        "1",
        "--b",
        "2.718281828459045",
        "--mu",
        "2.9",
        "--grid",
        "200",
    ]);
    assert_eq!(code(&pass), 0, "{}", text(&pass.stderr));
    let stdout = text(&pass.stdout);
    assert_eq!(report_value(&stdout, "status"), Some("pass"));
    for b in ["i", "ii", "iii", "iv"] {
        assert_eq!(report_value(&stdout, &format!("bound.{b}.status")), Some("pass"));
    }
    let wide = hbvp(&[
        "validate-green",
        "--a",
        "0.5",
        "--b",
        "7.3",
        "--mu",
        "2.05",
        "--grid",
        "200",
    ]);
    assert_eq!(code(&wide), 0);
    for bad in [
        ["--a", "1", "--b", "2", "--mu", "3.5"],
        ["--a", "1", "--b", "2", "--mu", "2"],
        ["--a", "-1", "--b", "2", "--mu", "2.5"],
        ["--a", "2", "--b", "1", "--mu", "2.5"],
    ] {
        let mut args = vec!["validate-green"];
        args.extend(bad);
        assert_eq!(code(&hbvp(&args)), 2, "{bad:?}");
    }
    assert_eq!(
        code(&hbvp(&[
            "validate-green",
            "--a",
            "1",
            "--b",
            "2",
            "--mu",
            "2.5",
            "--grid",
            "1"
        ])),
        2
    );
}

#[test]
fn check_separates_the_two_example_files() {
    let ok = hbvp(&["check", problems().join("example.problem").to_str().unwrap()]);
    assert_eq!(code(&ok), 0, "{}", text(&ok.stderr));
    assert_eq!(report_value(&text(&ok.stdout), "status"), Some("pass"));
    let too_big = hbvp(&["check", problems().join("example_2x.problem").to_str().unwrap()]);
    assert_eq!(code(&too_big), 1);
    let stdout = text(&too_big.stdout);
    assert_eq!(report_value(&stdout, "status"), Some("FAIL"));
    let too_big_solve = hbvp(&[
        "solve",
        problems().join("example_2x.problem").to_str().unwrap(),
        "--out",
        "/nonexistent/unused.csv",
    ]);
    assert_eq!(code(&too_big_solve), 1);
}

#[test]
fn solve_writes_a_reproducible_positive_solution() {
    let dir = tempfile::tempdir().unwrap();
    let problem = problems().join("example.problem");
    let problem = problem.to_str().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");

    let out = hbvp(&["solve", problem, "--out", first.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert_eq!(report_value(&stdout, "converged"), Some("true"));
    assert_eq!(report_value(&stdout, "status"), Some("pass"));
    let m: usize = report_value(&stdout, "m").unwrap().parse().unwrap();

    let csv = std::fs::read_to_string(&first).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(csv.lines().next(), Some("t,s,x,w,r_lower_w"));
    assert_eq!(rows.len(), m);
    assert_eq!(rows[0][2], 0.0);
    assert_eq!(rows[m - 1][2], 0.0);
    for row in &rows[1..m - 1] {
        assert!(row[2] > 0.0);
        assert!(row[2] >= row[4] - 1e-8, "x below r·w at t = {}", row[0]);
    }

    let residual = hbvp(&["residual", problem, first.to_str().unwrap()]);
    assert_eq!(code(&residual), 0, "{}", text(&residual.stdout));
    assert_eq!(report_value(&text(&residual.stdout), "status"), Some("pass"));

    let again = hbvp(&["solve", problem, "--out", second.to_str().unwrap()]);
    assert_eq!(code(&again), 0);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(stdout, text(&again.stdout));

    let perturbed: String = csv
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == m / 2 {
                let mut cols: Vec<String> = l.split(',').map(str::to_owned).collect();
                let x: f64 = cols[2].parse().unwrap();
                cols[2] = format!("{:.16e}", x * 1.01);
                cols.join(",") + "\n"
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    let bad = dir.path().join("perturbed.csv");
    std::fs::write(&bad, perturbed).unwrap();
    let residual = hbvp(&["residual", problem, bad.to_str().unwrap()]);
    assert_eq!(code(&residual), 1);

    let foreign = dir.path().join("foreign.csv");
    std::fs::write(&foreign, "t,s,x,w,r_lower_w\n1,0,0,0,0\n").unwrap();
    assert_eq!(code(&hbvp(&["residual", problem, foreign.to_str().unwrap()])), 2);
}
