use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cantordiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantordiff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classify_simple_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = cantordiff(&[
        "classify",
        "--a",
        "0.26",
        "--b",
        "0.01",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["region"], "Simple");
    assert!((v["dimSum"].as_f64().unwrap() - 1.0291).abs() < 1e-4);
    assert_eq!(read_json(&dir.path().join("classify.json")), v);
    let cfg = read_json(&dir.path().join("config.json"));
    assert_eq!(cfg["a"], 0.26);
    assert!(cfg["epsilon"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = cantordiff(&["classify", "--b", "0.01", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let o = cantordiff(&[
        "classify",
        "--a",
        "0.3",
        "--b",
        "0.05",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = cantordiff(&[
        "typespace",
        "--a",
        "0.28",
        "--b",
        "0.05",
        "--epsilon",
        "0.5",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"a\": 0.26,\n \"b\": }").unwrap();
    let o = cantordiff(&["classify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.json");
    std::fs::write(&file, r#"{"a": 0.26, "b": 0.01, "seed": 9}"#).unwrap();
    let o = cantordiff(&[
        "classify",
        "--config",
        file.to_str().unwrap(),
        "--b",
        "0.05",
        "--a",
        "0.28",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["region"], "General");
    let cfg = read_json(&dir.path().join("config.json"));
    assert_eq!(
        (cfg["b"].as_f64(), cfg["seed"].as_u64()),
        (Some(0.05), Some(9))
    );
}

#[test]
fn spectrum_simple_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = cantordiff(&[
        "spectrum",
        "--a",
        "0.26",
        "--b",
        "0.01",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let rho: f64 = row[3].parse().unwrap();
    assert!(rho > 1.0 && rho <= 1.04, "rho = {rho}");
    for f in [
        "eigenfunctions.csv",
        "harris.csv",
        "sweep.csv",
        "spectrum.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn written_config_reproduces_outputs() {
    let first = tempfile::tempdir().unwrap();
    let o = cantordiff(&[
        "diffset",
        "--a",
        "0.26",
        "--b",
        "0.01",
        "--N",
        "6",
        "--depth",
        "6",
        "--trials",
        "300",
        "--union-trials",
        "5",
        "--seed",
        "4",
        "--out",
        &out_arg(first.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let second = tempfile::tempdir().unwrap();
    let cfg = first.path().join("config.json");
    let o = cantordiff(&[
        "diffset",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        &out_arg(second.path()),
    ]);
    assert!(o.status.success());
    for f in ["coverage.csv", "diffset.json"] {
        let a = std::fs::read(first.path().join(f)).unwrap();
        let b = std::fs::read(second.path().join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn renders_are_byte_identical() {
    for cmd in ["render-region", "render-squares", "render-kernel"] {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for d in [&d1, &d2] {
            let o = cantordiff(&[
                cmd,
                "--a",
                "0.28",
                "--b",
                "0.05",
                "--out",
                &out_arg(d.path()),
            ]);
            assert!(
                o.status.success(),
                "{cmd}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
        for entry in std::fs::read_dir(d1.path()).unwrap() {
            let name = entry.unwrap().file_name();
            if name == "config.json" {
                continue;
            }
            assert_eq!(
                std::fs::read(d1.path().join(&name)).unwrap(),
                std::fs::read(d2.path().join(&name)).unwrap()
            );
        }
    }
}

#[test]
fn branching_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = cantordiff(&[
        "branching",
        "--a",
        "0.28",
        "--b",
        "0.05",
        "--x",
        "-0.05",
        "--generations",
        "4",
        "--trials",
        "500",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 3);
    let o = cantordiff(&[
        "branching",
        "--a",
        "0.28",
        "--b",
        "0.05",
        "--x",
        "0.3",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2), "x = 0.3 lies in a removed gap");
}

#[test]
fn bound_with_given_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = cantordiff(&[
        "bound",
        "--a",
        "0.26",
        "--b",
        "0.01",
        "--q",
        "0.2",
        "--delta",
        "0.2",
        "--N",
        "44",
        "--kmax",
        "30",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"].as_f64().unwrap() >= 0.0);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("bound.csv"))
            .unwrap()
            .lines()
            .count(),
        31
    );
}
