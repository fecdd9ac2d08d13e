use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pdo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdo-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn small_suite(dir: &Path) -> String {
    let text = r#"{
  "schema": 1,
  "settings": { "half_period": 4.0, "ladder": [32, 64], "trials": 2, "seed": 0 },
  "experiments": [
    {
      "name": "hy",
      "experiment": {
        "kind": "hausdorff_young",
        "exponents": [2.0, 1.0],
        "grid": { "n": 1, "N": 2, "L": 4.0, "G": 16 },
        "trials": 5,
        "seed": 0
      }
    },
    {
      "name": "pw",
      "experiment": {
        "kind": "pointwise_bound",
        "symbol": { "constructor": "oscillatory", "m": -0.8, "rho": 0.5, "n": 1, "blocks": 2 },
        "ps": [2.0, 2.0]
      }
    }
  ]
}"#;
    let path = dir.join("suite.json");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn threshold_value() {
    let o = pdo(&["threshold", "--rho", "0.5", "--p", "2", "--q", "2", "--r", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-0.25");
}

#[test]
fn threshold_verbose_and_infinite_exponents() {
    let o = pdo(&["threshold", "--rho", "0.5", "--p", "inf", "--q", "2", "--r", "2", "--verbose"]);
    assert!(o.status.success());
    let s = stdout(&o);
    // 1/p = 0, 1/q = 1/2: max{1/2, -1/2, 1/2, 1/2} = 1/2, weaker 2(1/2)(-1/2) - 1/4
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines, ["-0.25", "weaker -0.75", "region Central"]);
}

#[test]
fn inconsistent_triple_is_rejected() {
    let o = pdo(&["threshold", "--rho", "0.5", "--p", "2", "--q", "2", "--r", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"schema": 1, "experiments": [], "extra": true}"#).unwrap();
    let o = pdo(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = pdo(&["run", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_suite_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_suite(dir.path());
    let out = dir.path().join("reports");
    let o = pdo(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for f in ["summary.csv", "summary.txt", "hy.json", "hy.csv", "hy.dat", "pw.json", "pw.csv", "pw.dat"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("name,experiment,claim,verdict,sup,exploratory"));
    assert_eq!(summary.lines().filter(|l| l.contains(",pass,")).count(), 2);
}

#[test]
fn seed_and_grid_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_suite(dir.path());
    let base = dir.path().join("base");
    let seeded = dir.path().join("seeded");
    let capped = dir.path().join("capped");
    assert!(pdo(&["run", "--config", &cfg, "--out", base.to_str().unwrap()]).status.success());
    assert!(pdo(&["run", "--config", &cfg, "--out", seeded.to_str().unwrap(), "--seed", "9"]).status.success());
    assert!(pdo(&["run", "--config", &cfg, "--out", capped.to_str().unwrap(), "--grid", "32"]).status.success());

    let read = |d: &Path| fs::read_to_string(d.join("pw.csv")).unwrap();
    let seeds = |s: &str| -> Vec<u64> { s.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect() };
    let levels = |s: &str| -> Vec<usize> { s.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect() };
    assert!(seeds(&read(&base)).iter().all(|&s| s < 2));
    assert!(seeds(&read(&seeded)).iter().all(|&s| s == 9 || s == 10));
    assert!(levels(&read(&base)).contains(&64));
    assert!(levels(&read(&capped)).iter().all(|&g| g == 32));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_suite(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(pdo(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(pdo(&["run", "--config", &cfg, "--out", b.to_str().unwrap(), "--jobs", "1"]).status.success());
    for f in ["summary.csv", "hy.csv", "pw.csv", "pw.dat"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn kernel_decay_pass_and_fail() {
    let ok = pdo(&["kernel-decay", "--symbol", "osc:m=-1,rho=0.5", "--orders", "2", "--grid", "128"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("Pass"));
    let bad = pdo(&["kernel-decay", "--symbol", "osc:m=-1,rho=0.5", "--orders", "10", "--grid", "128"]);
    assert_eq!(bad.status.code(), Some(1), "{}", stdout(&bad));
}

#[test]
fn unknown_symbol_kind_exits_2() {
    let o = pdo(&["kernel-decay", "--symbol", "wobble:m=1", "--orders", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pdo(&["seminorms", "--symbol", "osc:m=-1,rho=0.5,zeta=3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seminorms_prints_json() {
    let o = pdo(&["seminorms", "--symbol", "osc:m=-0.5,rho=0.75", "--alpha", "1", "--radius", "16"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("json output");
    assert!(v.is_object());
}

#[test]
fn s_operator_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = pdo(&["lemma61", "--symbols", "2", "--grid", "16", "--trials", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(out.join("s_operator_0.json").exists());
    assert!(out.join("s_operator_1.csv").exists());
}
