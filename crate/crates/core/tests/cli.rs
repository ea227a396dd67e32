use std::path::Path;
use std::process::{Command, Output};

const HYPELLIP: &str = "x2^2 + x2*(x1^3 + t^-2*x1^2 + t^-2*x1 + t^-1) + 1";

fn tropmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropmono")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn analyze_hyperelliptic() {
    let o = tropmono(&["analyze", "--poly", HYPELLIP]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["smoothness"]["smooth"], true);
    assert_eq!(v["complex"]["bounded_edges"].as_array().unwrap().len(), 7);
    let exps: Vec<&str> = v["monodromy"]["word"]["sorted_exponents"].as_array().unwrap().iter().map(|e| e.as_str().unwrap()).collect();
    assert_eq!(exps, ["1", "1", "2", "2", "2", "4", "12"]);
}

#[test]
fn analyze_from_file_with_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.txt");
    std::fs::write(&input, "t^-1 + x1 + x2 + x1^-1*x2^-1\n").unwrap();
    let json = dir.path().join("out.json");
    let o = tropmono(&["analyze", "--poly", input.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
}

#[test]
fn non_smooth_exits_2_with_certificate() {
    let o = tropmono(&["analyze", "--poly", "1 + x1 + x2 + x1*x2"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["smoothness"]["smooth"], false);
    assert!(!v["smoothness"]["certificate"].is_null());
    assert!(stderr(&o).contains("not smooth"));
}

#[test]
fn syntax_error_points_at_position() {
    let o = tropmono(&["analyze", "--poly", "1 + x1 + * x2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("1 + x1 + * x2"), "{err}");
    let caret = err.lines().find(|l| l.trim() == "^").expect("caret line");
    assert_eq!(caret.find('^').unwrap(), 2 + "1 + x1 + ".len());
}

#[test]
fn verify_requires_seed() {
    let o = tropmono(&["verify", "--poly", HYPELLIP]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn verify_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cloud.csv");
    let o = tropmono(&["verify", "--poly", HYPELLIP, "--seed", "3", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
    assert_eq!(stderr(&o).lines().filter(|l| l.starts_with("PASS")).count(), 6);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("re1,im1,re2,im2,log1,log2,residual\n"));
    assert!(rows.lines().count() > 100);
}

#[test]
fn verify_large_cutoff_fails_with_3() {
    let o = tropmono(&["verify", "--poly", HYPELLIP, "--seed", "1", "--C0", "1.5", "--C1", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("warning"));
    assert!(err.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn verify_refuses_non_smooth() {
    let o = tropmono(&["verify", "--poly", "1 + x1 + x2 + x1*x2", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.svg");
    let o = tropmono(&["plot", "--poly", HYPELLIP, "--out", out.to_str().unwrap(), "--regions", "--amoeba", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("id=\"subdivision\""));
}

#[test]
fn plot_rejects_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.svg");
    let o = tropmono(&["plot", "--poly", "1 + x1 + x2 + x3", "--dim", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!Path::new(&out).exists());
}

#[test]
fn analyze_with_refining_fan() {
    let dir = tempfile::tempdir().unwrap();
    let fan = dir.path().join("fan.json");
    let rays = "[[1,1],[1,0],[1,-1],[1,-2],[0,-1],[-1,-1],[-1,0],[-2,1],[-1,1],[0,1]]";
    let cones: Vec<String> = (0..10).map(|i| format!("[{},{}]", i, (i + 1) % 10)).collect();
    std::fs::write(&fan, format!("{{\"rays\": {rays}, \"cones\": [{}]}}", cones.join(","))).unwrap();
    let o = tropmono(&["analyze", "--poly", "t^-1 + x1 + x2 + x1^-1*x2^-1", "--fan", fan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["compactified"]["available"], true, "{}", v["compactified"]);
}

#[test]
fn output_is_reproducible() {
    let run = |args: &[&str]| tropmono(args).stdout;
    let a = ["analyze", "--poly", HYPELLIP];
    assert_eq!(run(&a), run(&a));
    let v = ["verify", "--poly", HYPELLIP, "--seed", "9"];
    assert_eq!(run(&v), run(&v));
}
