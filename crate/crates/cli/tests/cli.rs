use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz-verify"))
        .args(args)
        .output()
        .expect("spawn toeplitz-verify")
}

fn records(out: &Output) -> Vec<Value> {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON record list")
}

fn find<'a>(recs: &'a [Value], check: &str) -> &'a Value {
    recs.iter()
        .find(|r| r["check"] == check)
        .unwrap_or_else(|| panic!("no record {check}"))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn projection_bound_passes_with_unit_bracket() {
    let out = verify(&[
        "bound", "--domain", "disc", "--p", "2", "--q", "2", "--a", "0", "--alpha", "0", "--beta",
        "0",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&out);
    assert_eq!(num(&find(&recs, "boundedness")["values"]["sup_m"]), 1.0);
    let br = &find(&recs, "norm-bracket")["values"];
    assert!(num(&br["lower"]) <= 1.0 + 1e-6 && num(&br["upper"]) >= 1.0 - 1e-6);
    for r in &recs {
        assert!(r["grid"]["n_r"].as_u64().is_some(), "record without grid");
    }
}

#[test]
fn hilbert_schmidt_partial_sums() {
    let out = verify(&[
        "schatten", "--domain", "disc", "--alpha", "0", "--beta", "1", "--s", "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&out);
    let s = &find(&recs, "schatten")["values"];
    assert_eq!(s["verdict"], "converging");
    let last = s["partial_sums"].as_array().unwrap().last().unwrap()[1]
        .as_f64()
        .unwrap();
    assert!((last - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-2, "{last}");
}

#[test]
fn admissibility_and_usage_errors_exit_2() {
    let out = verify(&["bound", "--p", "2", "--q", "4", "--a", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a < q/p'"));
    assert_eq!(verify(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        verify(&["bound", "--domain", "annulus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        verify(&["bound", "--grid-radial", "many"]).status.code(),
        Some(2)
    );
    assert_eq!(
        verify(&["berezin", "--alpha", "1", "--beta", "0.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let out = verify(&["kernel-check", "--out-dir", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["kernel-check", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("report.json");
    let parsed = toeplitz_core::report::read_records(&path).unwrap();
    let again: Vec<toeplitz_core::ReportRecord> =
        serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, again);
    assert_eq!(parsed.len(), records(&out).len());
}

fn column(path: &Path, idx: usize) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|row| row.unwrap()[idx].parse().unwrap())
        .collect()
}

#[test]
fn csv_tables_are_plot_ready() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = verify(&["schatten", "--output", "csv", "--out-dir", d]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["sigma.csv", "sigma_nystrom.csv"] {
        let sigma = column(&dir.path().join(name), 1);
        assert!(sigma.len() > 10);
        assert!(
            sigma.windows(2).all(|w| w[1] <= w[0]),
            "{name} not nonincreasing"
        );
    }
    let out = verify(&["bound", "--output", "csv", "--out-dir", d]);
    assert_eq!(out.status.code(), Some(0));
    let dz = column(&dir.path().join("m_profile.csv"), 0);
    assert!(dz.len() > 100 && dz.windows(2).all(|w| w[1] < w[0]));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("check,status"));
}

fn without_wall_time(path: &Path) -> String {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    for r in v.as_array_mut().unwrap() {
        r["wall_time"] = Value::from(0.0);
    }
    serde_json::to_string_pretty(&v).unwrap()
}

#[test]
fn same_seed_gives_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for run in ["a", "b"] {
        let d = dir.path().join(run);
        let out = verify(&[
            "bound",
            "--alpha",
            "0.5",
            "--beta",
            "0.5",
            "--seed",
            "11",
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        texts.push(without_wall_time(&d.join("report.json")));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# overridden below\np = 3\nq = 3\nbeta = 0.5\n").unwrap();
    let out = verify(&["bound", "--config", cfg.to_str().unwrap(), "--p", "2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&out);
    let inputs = &find(&recs, "boundedness")["inputs"];
    assert_eq!(
        (num(&inputs["p"]), num(&inputs["q"]), num(&inputs["beta"])),
        (2.0, 3.0, 0.5)
    );
    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(
        verify(&["bound", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn thread_count_variable() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_toeplitz-verify"))
            .args(["kernel-check"])
            .env("TOEPLITZ_THREADS", v)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("2"), Some(0));
    assert_eq!(run("lots"), Some(2));
}
