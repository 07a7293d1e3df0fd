use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_limitmotive"));
    cmd.env_remove("LIMITMOTIVE_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn corpus_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", &corpus_file("triangle.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("valid"));

    let dangling = run(&["validate", &fixture("dangling.json")]);
    assert_eq!(dangling.status.code(), Some(2));
    assert!(stdout(&dangling).contains("dangling reference"), "{}", stdout(&dangling));

    let bad = run(&["validate", &fixture("zero_denominator.json")]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("zero denominator"), "{}", stderr(&bad));
    assert!(stderr(&bad).contains("line 3"), "{}", stderr(&bad));

    let truncated = run(&["validate", &fixture("truncated.json")]);
    assert_eq!(truncated.status.code(), Some(3));
    assert!(stderr(&truncated).contains("line"));

    let missing = run(&["validate", &fixture("does_not_exist.json")]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn stability_flag() {
    let unstable = run(&["validate", "--stable", "builtin:banana"]);
    assert_eq!(unstable.status.code(), Some(2));
    assert!(stdout(&unstable).contains("stability failure"));
    assert_eq!(run(&["validate", "builtin:banana"]).status.code(), Some(0));
}

#[test]
fn invalid_curves_fail_other_commands_with_diagnostics() {
    for cmd in ["report", "motive", "dot"] {
        let o = run(&[cmd, &fixture("dangling.json")]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        let o = run(&[cmd, &fixture("zero_denominator.json")]);
        assert_eq!(o.status.code(), Some(3), "{cmd}");
    }
}

fn report_json(path: &str) -> Value {
    let o = run(&["report", "--format", "json", path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn report_pinned_values() {
    let t = report_json(&corpus_file("triangle.json"));
    assert_eq!(t["graded_dims"]["Gr^W_0 H^1_lim"], 1);
    assert_eq!(t["graded_dims"]["Gr^W_1 H^1_lim"], 0);
    assert_eq!(t["graded_dims"]["Gr^W_2 H^1_lim"], 1);
    assert_eq!(t["lattice_rank"], 1);
    assert_eq!(t["pairing_matrix"], serde_json::json!([[3]]));
    assert_eq!(t["torus_rank"], 1);
    assert_eq!(t["betti1"], 1);
    assert_eq!(t["nodes"], 3);
    assert_eq!(t["components"], 3);

    let tree = report_json(&corpus_file("tree12.json"));
    assert_eq!(tree["graded_dims"]["Gr^W_1 H^1_lim"], 6);
    assert_eq!(tree["lattice_rank"], 0);
    assert_eq!(tree["genus"], 3);

    let banana = report_json("builtin:banana");
    assert_eq!(banana["pairing_matrix"], serde_json::json!([[2]]));
}

#[test]
fn report_is_deterministic_and_round_trips() {
    let first = run(&["report", "--format", "json", "builtin:mixed-cycle"]);
    let second = run(&["report", "--format", "json", "builtin:mixed-cycle"]);
    assert_eq!(first.stdout, second.stdout);

    let value: Value = serde_json::from_slice(&first.stdout).unwrap();
    let dir = std::env::temp_dir().join(format!("limitmotive-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("embedded.json");
    std::fs::write(&path, serde_json::to_string(&value["curve"]).unwrap()).unwrap();
    let again = run(&["report", "--format", "json", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(first.stdout, again.stdout);
}

#[test]
fn motive_command() {
    let o = run(&["motive", "--format", "json", "--divisor", "-1,-1,1", "builtin:triangle"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        v["images"][0]["torus_coordinates"][0],
        serde_json::json!({"coeff": "-36/1", "texp": 3})
    );

    let zero = run(&["motive", "--format", "json", "--divisor", "0,0,0", "builtin:triangle"]);
    let v: Value = serde_json::from_str(&stdout(&zero)).unwrap();
    assert_eq!(
        v["images"][0]["torus_coordinates"][0],
        serde_json::json!({"coeff": "1/1", "texp": 0})
    );

    let bad = run(&["motive", "--divisor", "1,0,0", "builtin:triangle"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("not in L: incidence * D = [1, -1, 0]"));

    let symbolic = run(&["motive", "builtin:mixed-cycle"]);
    assert_eq!(symbolic.status.code(), Some(0));
    assert!(stdout(&symbolic).contains("abelian part not evaluated"));
}

#[test]
fn selfcheck_command() {
    let o = run(&["koszul-selfcheck"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("closed-form cohomology: 200 instances"));
    assert!(stdout(&o).contains("graded pieces: 100 instances"));

    let json = |seed: &str| {
        let o = bin()
            .args(["koszul-selfcheck", "--format", "json", "--max-rank", "2"])
            .env("LIMITMOTIVE_SEED", seed)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_slice::<Value>(&o.stdout).unwrap()
    };
    let a = json("7");
    assert_eq!(a["seed"], 7);
    assert_eq!(a["passed"], true);
    assert_eq!(a, json("7"));
    let over = run(&["koszul-selfcheck", "--format", "json", "--seed", "9"]);
    let v: Value = serde_json::from_slice(&over.stdout).unwrap();
    assert_eq!(v["seed"], 9);

    let vacuous = run(&["koszul-selfcheck", "--max-rank", "0"]);
    assert_eq!(vacuous.status.code(), Some(0));
    assert!(stdout(&vacuous).contains("vacuous"));
}

#[test]
fn dot_command() {
    let tri = stdout(&run(&["dot", "builtin:triangle"]));
    assert!(tri.starts_with("digraph"));
    assert_eq!(tri.matches("->").count(), 3);
    assert_eq!(tri.matches("(g=0)").count(), 3);
    let cubic = stdout(&run(&["dot", "builtin:nodal-cubic"]));
    assert!(cubic.contains("\"X\" -> \"X\""));
    let tree = stdout(&run(&["dot", "builtin:tree12"]));
    assert_eq!(tree.matches("->").count(), 1);
    assert!(tree.contains("(g=1)") && tree.contains("(g=2)"));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["bogus"]).status.code(), Some(3));
    assert_eq!(run(&["report"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["report", "builtin:ngon:0"]).status.code(), Some(3));
    assert_eq!(run(&["report", "builtin:ngon:4"]).status.code(), Some(0));
}
