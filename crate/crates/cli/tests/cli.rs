use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matgauge")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_without_clock(o: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&o.stdout).expect("json output");
    v["manifest"].as_object_mut().unwrap().remove("wall_clock_seconds");
    v
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn two_generator_example_prints_its_values() {
    let o = run(&["verify-examples", "--example", "two-generator", "--n", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("nu_max = 1.33333"), "{out}");
    assert!(out.contains("nu_e = 1\n"), "{out}");
}

#[test]
fn nu_on_the_degenerate_line_is_one() {
    let (s, x) = (data("degenerate_line.json"), data("degenerate_line_x.json"));
    let o = run(&["gauge", "--which", "nu", "--space", p(&s), "--element", p(&x)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "level: 1\nnu: 1\n");
}

#[test]
fn normality_check_is_clean() {
    let o = run(&["check", "--law", "normality", "--trials", "1000", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: clean"));
}

#[test]
fn violations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data("full_diagonal3.json"), dir.path().join("space.json")).unwrap();
    // Negative on the accretive generator e_1.
    let f = dir.path().join("f.json");
    std::fs::write(&f, r#"{ "space": "space.json", "values": [[-1, 0], [0, 0], [0, 0]] }"#).unwrap();
    let o = run(&["extension-check", "--functional", p(&f)]);
    assert_eq!(code(&o), 1, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("real-cp: VIOLATED"), "{}", stdout(&o));
}

#[test]
fn certified_non_extendability_exits_one() {
    let o = run(&["extension-check", "--functional", p(&data("pair_functional_n4_f.json"))]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("real-cp: clean") && out.contains("real-cc: clean"), "{out}");
    assert!(out.contains("extension lower bound at the unit: 2\n"), "{out}");
    assert!(out.contains("IMPOSSIBLE"), "{out}");
}

#[test]
fn small_unit_leaves_extension_unobstructed() {
    let o = run(&["extension-check", "--functional", p(&data("line_functional_n4_f.json")), "--unit", "1,1,0.2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("no obstruction found"));
}

#[test]
fn malformed_files_exit_two_with_the_json_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"ambient_dim": 3, "representation": "diagonal", "basis": [[[-2, 0], [0, "x"], [1, 0]]], "unit": null}"#,
    )
    .unwrap();
    let o = run(&["info", "--space", p(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("basis[0][1][1]"), "{}", stderr(&o));

    let elem = dir.path().join("z.json");
    std::fs::write(&elem, r#"{"level": 1, "coeffs": [[1, 0], [2, 0]]}"#).unwrap();
    let o = run(&["gauge", "--space", p(&data("degenerate_line.json")), "--element", p(&elem)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("coeffs"), "{}", stderr(&o));

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"bisect_tol": "tiny"}"#).unwrap();
    let o = run(&["info", "--space", p(&data("degenerate_line.json")), "--config", p(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bisect_tol"), "{}", stderr(&o));
}

#[test]
fn other_input_errors_exit_two() {
    let missing = run(&["info", "--space", "/nonexistent/space.json"]);
    assert_eq!(code(&missing), 2);
    let usage = run(&["no-such-command"]);
    assert_eq!(code(&usage), 2);
    let level = run(&[
        "gauge",
        "--space",
        p(&data("degenerate_line.json")),
        "--element",
        p(&data("degenerate_line_x.json")),
        "--level",
        "2",
    ]);
    assert_eq!(code(&level), 2);
    let oracle = run(&["nu-max", "--space", p(&data("full_diagonal3.json")), "--oracle", "--level", "2"]);
    assert_eq!(code(&oracle), 2, "{}", stderr(&oracle));
    let unit = run(&["extension-check", "--functional", p(&data("pair_functional_n4_f.json")), "--unit", "1,1"]);
    assert_eq!(code(&unit), 2);
}

#[test]
fn starved_solver_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"interior_point": false, "dykstra_max_iter": 3}"#).unwrap();
    let o = run(&[
        "nu-max",
        "--space",
        p(&data("two_generator_n4.json")),
        "--element",
        p(&data("two_generator_n4_z.json")),
        "--config",
        p(&cfg),
    ]);
    assert_eq!(code(&o), 3, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("converged: false"));
}

#[test]
fn config_overrides_field_by_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"level_cap": 2}"#).unwrap();
    let o = run(&["info", "--space", p(&data("full_diagonal3.json")), "--config", p(&cfg), "--seed", "9", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json_without_clock(&o);
    assert_eq!(v["manifest"]["config"]["level_cap"], 2);
    assert_eq!(v["manifest"]["config"]["seed"], 9);
    assert_eq!(v["manifest"]["config"]["bisect_tol"], 1e-6);
    assert_eq!(v["manifest"]["command"], "info");
    assert_eq!(v["result"]["dimension"], 3);
    assert_eq!(v["result"]["self_adjoint"], true);
}

#[test]
fn json_reports_are_reproducible() {
    let args = ["check", "--law", "gauge-axioms", "--trials", "40", "--seed", "3", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(json_without_clock(&a), json_without_clock(&b));
    let v = json_without_clock(&a);
    assert!(v["result"]["trials"].as_u64().unwrap() >= 4 * 40);
    assert!(v["manifest"]["wall_clock_seconds"].is_null());

    let other = run(&["check", "--law", "gauge-axioms", "--trials", "40", "--seed", "4", "--format", "json"]);
    assert_ne!(json_without_clock(&a)["result"], json_without_clock(&other)["result"]);
}

#[test]
fn unitize_gauge_reads_the_scalar_part() {
    let o = run(&[
        "unitize-gauge",
        "--space",
        p(&data("degenerate_line.json")),
        "--element",
        p(&data("degenerate_line_unitized.json")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json_without_clock(&o);
    // ν(x)/(t − 1/2) ≤ 1 with ν(x) = 1.
    assert!((v["result"]["u"].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert!((v["result"]["order_unit_formula"].as_f64().unwrap() - 1.5).abs() < 1e-5);
}

#[test]
fn bundled_files_match_the_fixtures() {
    use matgauge::catalog;
    use matgauge::io;

    let (space, x) = catalog::degenerate_line().unwrap();
    let file = io::load_space(&data("degenerate_line.json")).unwrap();
    assert!(file.basis()[0].approx_eq(&space.basis()[0], 1e-15));
    assert_eq!(io::load_element(&file, &data("degenerate_line_x.json")).unwrap().element.coeffs(), x.coeffs());

    let (space, z) = catalog::two_generator(4.0).unwrap();
    let file = io::load_space(&data("two_generator_n4.json")).unwrap();
    for (a, b) in file.basis().iter().zip(space.basis()) {
        assert!(a.approx_eq(b, 1e-15));
    }
    assert_eq!(io::load_element(&file, &data("two_generator_n4_z.json")).unwrap().element.coeffs(), z.coeffs());

    for (name, (space, values)) in [
        ("line_functional_n4_f.json", catalog::line_functional(4.0).unwrap()),
        ("pair_functional_n4_f.json", catalog::pair_functional(4.0).unwrap()),
    ] {
        let f = io::load_functional(&data(name)).unwrap();
        assert_eq!(f.values, values);
        for (a, b) in f.space.basis().iter().zip(space.basis()) {
            assert!(a.approx_eq(b, 1e-15), "{name}");
        }
    }

    let full = io::load_space(&data("full_diagonal3.json")).unwrap();
    assert_eq!(full.dim(), catalog::full_diagonal(3).unwrap().dim());
    assert!(full.order_unit_coeffs().is_some());
}

#[test]
fn sampled_elements_follow_the_seed() {
    let s = data("full_diagonal3.json");
    let a = run(&["norm", "--space", p(&s), "--level", "2", "--seed", "5"]);
    let b = run(&["norm", "--space", p(&s), "--level", "2", "--seed", "5"]);
    let c = run(&["norm", "--space", p(&s), "--level", "2", "--seed", "6"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
    // Both norms are printed and agree on this space.
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1].trim_start_matches("norm: "), lines[2].trim_start_matches("spectral norm: "));
}
