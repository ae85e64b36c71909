use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antilinear")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SWAP: &str = r#"{"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}"#;

#[test]
fn extract_swap_operator() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "swap.json", SWAP);
    let output = dir.path().join("data.json");
    let out = run(&["extract", "--input", s(&input), "--output", s(&output)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let data = read_json(&output);
    assert_eq!(data["nodes"][0].as_f64(), Some(1.0));
    assert_eq!(data["weights"][0].as_f64(), Some(1.0));
    assert_eq!(complex(&data["phases"][0]), (0.0, 0.0));
    let table = fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert!(table.starts_with("s,w,re_psi,im_psi,class\n"));
    assert!(table.trim_end().ends_with(",S2"));
}

#[test]
fn extract_scalar_to_stdout() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "i.json", r#"{"matrix": [[[0,1]]]}"#);
    let out = run(&["extract", "--input", s(&input)]);
    assert_eq!(code(&out), 0);
    let data: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(data["nodes"][0].as_f64(), Some(1.0));
    assert_eq!(complex(&data["phases"][0]), (0.0, 1.0));
}

#[test]
fn malformed_and_invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "broken.json", r#"{"matrix": [[[0,0"#);
    assert_eq!(code(&run(&["extract", "--input", s(&broken)])), 2);

    let asymmetric = write(&dir, "asym.json", r#"{"matrix": [[[0,0],[1,0]],[[2,0],[0,0]]]}"#);
    assert_eq!(code(&run(&["extract", "--input", s(&asymmetric)])), 2);

    let heavy = write(&dir, "heavy.json", r#"{"nodes":[1],"weights":[2],"phases":[[0,0]]}"#);
    assert_eq!(code(&run(&["tridiag", "--input", s(&heavy)])), 2);

    let input = write(&dir, "swap.json", SWAP);
    assert_eq!(code(&run(&["extract", "--input", s(&input), "--output", s(&input)])), 2);
    assert_eq!(fs::read_to_string(&input).unwrap(), SWAP);

    let out = dir.path().join("ex");
    assert_eq!(code(&run(&["example", "--size", "5001", "--output", s(&out)])), 2);
    assert_eq!(code(&run(&["example", "--quadrature", "100001", "--output", s(&out)])), 2);
    assert_eq!(code(&run(&["example", "--omega", "1,2,3", "--output", s(&out)])), 2);
    assert_eq!(code(&run(&["tridiag", "--input", s(&input), "--tol-degeneracy", "-1"])), 2);
}

#[test]
fn missing_input_exits_4() {
    assert_eq!(code(&run(&["extract", "--input", "/nonexistent/operator.json"])), 4);
}

#[test]
fn tridiag_examples() {
    let dir = TempDir::new().unwrap();
    let zero = write(&dir, "zero.json", r#"{"nodes":[1],"weights":[1],"phases":[[0,0]]}"#);
    let out = run(&["tridiag", "--input", s(&zero)]);
    assert_eq!(code(&out), 0);
    let params: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(params["a"].as_array().unwrap().len(), 1);
    assert!((params["a"][0].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(params["b"].as_array().unwrap().len(), 2);
    assert_eq!(params["count"].as_u64(), Some(2));
    assert_eq!(params["termination"].as_str(), Some("breakdown"));

    let unimodular = write(&dir, "s1.json", r#"{"nodes":[2.5],"weights":[1],"phases":[[1,0]]}"#);
    let out = run(&["tridiag", "--input", s(&unimodular)]);
    let params: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(params["count"].as_u64(), Some(1));
    assert_eq!(complex(&params["b"][0]), (2.5, 0.0));
}

#[test]
fn tridiag_operator_matches_gram_schmidt_route() {
    let dir = TempDir::new().unwrap();
    let jacobi = r#"{"matrix": [
        [[0.3,0.2],[1.2,0],[0,0]],
        [[1.2,0],[-0.5,1.0],[0.7,0]],
        [[0,0],[0.7,0],[1.1,-0.4]]]}"#;
    let op = write(&dir, "op.json", jacobi);
    let out = run(&["tridiag", "--input", s(&op)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let params: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(params["cross_check"].as_f64().unwrap() <= 1e-8);
    assert!((params["a"][0].as_f64().unwrap() - 1.2).abs() < 1e-10);
    let (re, im) = complex(&params["b"][2]);
    assert!((re - 1.1).abs() < 1e-10 && (im + 0.4).abs() < 1e-10);
}

#[test]
fn model_then_roundtrip() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "data.json",
        r#"{"nodes":[0.5,1.0,2.0],"weights":[0.2,0.3,0.5],"phases":[[0.3,0.1],[0,1],[-0.2,0]]}"#,
    );
    let model = dir.path().join("model.json");
    let out = run(&["model", "--input", s(&data), "--output", s(&model)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let file = read_json(&model);
    assert_eq!(file["matrix"].as_array().unwrap().len(), 5);
    assert!(file["cyclic"].is_array());
    let report = read_json(&dir.path().join("model.report.json"));
    assert_eq!(report["krylov_rank"].as_u64(), Some(5));
    assert_eq!(report["multiplicities_match"].as_bool(), Some(true));

    let back = dir.path().join("back.json");
    assert_eq!(code(&run(&["extract", "--input", s(&model), "--output", s(&back)])), 0);
    let back = read_json(&back);
    for j in 0..3 {
        assert!((back["weights"][j].as_f64().unwrap() - [0.2, 0.3, 0.5][j]).abs() < 1e-10);
    }

    let report_path = dir.path().join("roundtrip.json");
    let out = run(&["roundtrip", "--input", s(&model), "--output", s(&report_path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&report_path);
    assert_eq!(report["pass"].as_bool(), Some(true));
    assert!(report["max_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn polys_from_jacobi_parameters() {
    let dir = TempDir::new().unwrap();
    let params = write(&dir, "j.json", r#"{"a":[1,1,1],"b":[[0.5,0.5],[0,0],[0,0]]}"#);
    let out = run(&["polys", "--input", s(&params), "--coeffs", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let polys: Value = serde_json::from_slice(&out.stdout).unwrap();
    let polys = polys.as_array().unwrap();
    assert_eq!(polys.len(), 3);
    // q₁ = s - ω
    assert_eq!(complex(&polys[1][0]), (-0.5, -0.5));
    assert_eq!(complex(&polys[1][1]), (1.0, 0.0));
}

#[test]
fn example_report_and_curves() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("omega2");
    let out = run(&["example", "--omega", "2", "--quadrature", "4000", "--coeffs", "20", "--output", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("report.json"));
    assert_eq!(report["atom"]["location"].as_f64(), Some(2.5));
    assert_eq!(report["atom"]["weight"].as_f64(), Some(0.75));
    assert!(report["coefficient_error"].as_f64().unwrap() <= 1e-5);
    assert_eq!(report["coefficients"].as_array().unwrap().len(), 20);
    for name in ["density.csv", "phase.csv", "coefficients.csv"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let coefficients = fs::read_to_string(out_dir.join("coefficients.csv")).unwrap();
    assert_eq!(coefficients.lines().next(), Some("n,a_n,re_b_n,im_b_n,abs_error"));
    assert_eq!(coefficients.lines().count(), 21);

    let free = dir.path().join("free");
    assert_eq!(code(&run(&["example", "--omega", "0", "--quadrature", "1000", "--output", s(&free)])), 0);
    let report = read_json(&free.join("report.json"));
    assert!(report["atom"].is_null());
    assert!(report["coefficient_error"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn sweep_writes_one_directory_per_coupling() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("sweep");
    let out = run(&["example", "--sweep", "0;1,1;-2", "--quadrature", "800", "--size", "300", "--output", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&out_dir.join("summary.json"));
    assert_eq!(summary.as_array().unwrap().len(), 3);
    assert_eq!(complex(&summary[2]["omega"]), (-2.0, 0.0));
    assert!(out_dir.join("omega-001").join("report.json").exists());
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "data.json",
        r#"{"nodes":[0,0.7,1.3],"weights":[0.25,0.25,0.5],"phases":[[1,0],[0.1,-0.6],[0.6,0.8]]}"#,
    );
    let mut runs = Vec::new();
    for k in 0..2 {
        let model = dir.path().join(format!("model{k}.json"));
        let ex = dir.path().join(format!("ex{k}"));
        assert_eq!(code(&run(&["model", "--input", s(&data), "--output", s(&model)])), 0);
        let out = run(&["example", "--omega", "1,1", "--quadrature", "600", "--size", "200", "--output", s(&ex)]);
        assert_eq!(code(&out), 0);
        runs.push((
            fs::read(&model).unwrap(),
            fs::read(dir.path().join(format!("model{k}.report.json"))).unwrap(),
            fs::read(ex.join("report.json")).unwrap(),
            fs::read(ex.join("coefficients.csv")).unwrap(),
        ));
    }
    assert!(runs[0] == runs[1]);
    let text = String::from_utf8(runs[0].0.clone()).unwrap();
    assert!(text.contains("e0") && !text.contains("-0.0000000000000000e0"));
}
