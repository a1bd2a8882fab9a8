use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ivcollage"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn ivcollage")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const ZERO_KERNEL_PROBLEM: &str = r#"{
  "domain": [0, 1],
  "kernel": { "kind": "affine-product", "c1": 0, "c2": 0 },
  "forcing": { "type": "endpoints", "lower": { "poly": [0, 1] }, "upper": { "poly": [1, 0, 1] } }
}"#;

const ARCTAN_FAMILY: &str = r#"{
  "kernel": "cos-arctan",
  "box": [[1.5, 2.5], [0.5, 1.5]],
  "domain": [0, 1],
  "forcing": { "type": "endpoints", "lower": { "poly": [0.125, 2] }, "upper": { "poly": [0.375, 2] } }
}"#;

#[test]
fn forward_example_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fwd");
    let o = run(&[
        "forward",
        "--example",
        "1",
        "--level",
        "3",
        "--eps",
        "1e-12",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert_eq!(csv.lines().next(), Some("t,lower,upper"));
    let report = json(out.join("report.json"));
    assert!(report["iterations"].as_u64().unwrap() >= 7);
    assert_eq!(report["status"], "converged");
    assert_eq!(report["order"], 81);
    let successive = report["successive"].as_array().unwrap();
    assert_eq!(
        successive.len() as u64,
        report["iterations"].as_u64().unwrap()
    );
    assert!(report["tail_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn forward_zero_kernel_returns_forcing() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "zero.json", ZERO_KERNEL_PROBLEM);
    let out = dir.path().join("o");
    let o = run(&[
        "forward",
        "--problem",
        path_str(&problem),
        "--level",
        "2",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(out.join("report.json"));
    assert_eq!(report["iterations"], 1);
    assert_eq!(report["successive"][0], 0.0);
    let g = ivcollage::GridFun::read_csv(std::fs::File::open(out.join("solution.csv")).unwrap())
        .unwrap();
    for (j, t) in g.nodes().into_iter().enumerate() {
        assert_eq!(g.lower()[j], t);
        assert_eq!(g.upper()[j], 1.0 + t * t);
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "forward",
        "--problem",
        path_str(&dir.path().join("missing.json")),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let bad = write(dir.path(), "bad.json", r#"{ "kernel": "nope" }"#);
    let o = run(&[
        "forward",
        "--problem",
        path_str(&bad),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&[
        "forward",
        "--example",
        "1",
        "--level",
        "9",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&[
        "reproduce",
        "--example",
        "2",
        "--m",
        "3",
        "--level",
        "3",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["reproduce", "--example", "5", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["forward", "--example", "1", "--m", "3", "--eps", "1e-9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3_and_keeps_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nc");
    let o = run(&[
        "forward",
        "--example",
        "1",
        "--eps",
        "1e-14",
        "--max-iter",
        "4",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(out.join("solution.csv").exists());
    let report = json(out.join("report.json"));
    assert_eq!(report["status"], "max_iterations");
    assert_eq!(report["iterations"], 4);
}

#[test]
fn inverse_example_one_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inv");
    let o = run(&[
        "inverse",
        "--example",
        "1",
        "--m",
        "7",
        "--level",
        "3",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(out.join("result.json"));
    let lambda = r["lambda_star"].as_array().unwrap();
    assert!((lambda[0].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() <= 1e-3);
    assert!((lambda[1].as_f64().unwrap() + 1.0).abs() <= 1e-3);
    for key in ["objective", "rho_bound", "certificate", "evals", "starts"] {
        assert!(r[key].is_number(), "{key}");
    }
    assert_eq!(r["starts"], 5);
    assert!(out.join("target.csv").exists());
}

#[test]
fn forward_output_round_trips_as_inverse_target() {
    let dir = tempfile::tempdir().unwrap();
    let family = write(dir.path(), "family.json", ARCTAN_FAMILY);
    let problem = write(
        dir.path(),
        "problem.json",
        &ARCTAN_FAMILY
            .replace(
                r#""kernel": "cos-arctan""#,
                r#""kernel": { "kind": "cos-arctan", "c1": 2, "c2": 1 }"#,
            )
            .replace(r#""box": [[1.5, 2.5], [0.5, 1.5]],"#, ""),
    );
    let fwd = dir.path().join("fwd");
    let o = run(&[
        "forward",
        "--problem",
        path_str(&problem),
        "--m",
        "7",
        "--level",
        "3",
        "--out",
        path_str(&fwd),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let via_file = dir.path().join("file");
    let o = run(&[
        "inverse",
        "--family",
        path_str(&family),
        "--target",
        path_str(&fwd.join("solution.csv")),
        "--level",
        "3",
        "--out",
        path_str(&via_file),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let via_example = dir.path().join("ex");
    let o = run(&[
        "inverse",
        "--example",
        "2",
        "--m",
        "7",
        "--level",
        "3",
        "--out",
        path_str(&via_example),
    ]);
    assert!(o.status.success());

    let a = json(via_file.join("result.json"));
    let b = json(via_example.join("result.json"));
    assert_eq!(a["lambda_star"], b["lambda_star"]);
    assert_eq!(a["objective"], b["objective"]);

    let wrong_level = run(&[
        "inverse",
        "--family",
        path_str(&family),
        "--target",
        path_str(&fwd.join("solution.csv")),
        "--level",
        "4",
        "--out",
        path_str(&via_file),
    ]);
    assert_eq!(wrong_level.status.code(), Some(2));
}

#[test]
fn inverse_flat_and_degenerate_families() {
    let dir = tempfile::tempdir().unwrap();
    let family = write(dir.path(), "family.json", ARCTAN_FAMILY);
    let zero = write(
        dir.path(),
        "zero.csv",
        "t,lower,upper\n0,0,0\n0.25,0,0\n0.5,0,0\n0.75,0,0\n1,0,0\n",
    );
    let out = dir.path().join("flat");
    let o = run(&[
        "inverse",
        "--family",
        path_str(&family),
        "--target",
        path_str(&zero),
        "--level",
        "2",
        "--eval-grid",
        "65",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(out.join("result.json"))["no_descent"], true);

    let point = write(
        dir.path(),
        "point.json",
        &ARCTAN_FAMILY.replace("[[1.5, 2.5], [0.5, 1.5]]", "[[2, 2], [1, 1]]"),
    );
    let out = dir.path().join("point");
    let o = run(&[
        "inverse",
        "--family",
        path_str(&point),
        "--target",
        path_str(&zero),
        "--level",
        "2",
        "--eval-grid",
        "65",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(out.join("result.json"));
    assert_eq!(r["lambda_star"], serde_json::json!([2.0, 1.0]));
    assert_eq!(r["evals"], 1);
}

#[test]
fn reproduce_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let tables: Vec<Vec<u8>> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = run(&[
                "reproduce",
                "--example",
                "2",
                "--m",
                "7",
                "--level",
                "3",
                "--out",
                path_str(&out),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(out.join("table.csv")).unwrap()
        })
        .collect();
    assert_eq!(tables[0], tables[1]);
    let text = String::from_utf8(tables[0].clone()).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], &["7", "81", "81"]);
    let alpha: f64 = row[3].parse().unwrap();
    let beta: f64 = row[4].parse().unwrap();
    assert!((alpha - 2.0).abs() <= 1e-2 && (beta - 1.0).abs() <= 1e-2);
}

#[test]
fn reproduce_example_one_coarse_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "reproduce",
        "--example",
        "1",
        "--m",
        "3",
        "--level",
        "1",
        "--out",
        path_str(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], &["3", "9", "9"]);
    let alpha: f64 = row[3].parse().unwrap();
    assert!((alpha - std::f64::consts::SQRT_2).abs() <= 2e-2, "{alpha}");
}
