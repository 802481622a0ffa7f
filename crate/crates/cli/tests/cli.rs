use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bandphase"));
    c.env_remove("BANDPHASE_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn bandphase")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn values(text: &str) -> Vec<f64> {
    text.lines().map(|l| l.trim().parse().unwrap()).collect()
}

fn sorted_bits(mut v: Vec<f64>) -> Vec<u64> {
    v.sort_by(f64::total_cmp);
    v.into_iter().map(f64::to_bits).collect()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gen_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.txt");
    let b = path(&dir, "b.txt");
    for p in [&a, &b] {
        ok(&["gen", "--preset", "NLS", "--n", "2048", "--seed", "7", "-o", s(p)]);
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(text).unwrap().lines().count(), 2048);
    let meta = json(&path(&dir, "a.txt.meta.json"));
    assert_eq!(meta["command"], "gen");
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["parameters"]["preset"], "NLS");
    assert!(meta["version"].is_string());
}

#[test]
fn missing_seed_is_logged() {
    let out = ok(&["gen", "--preset", "LS", "--n", "512"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no --seed given, using 0"));
    let with_seed = ok(&["gen", "--preset", "LS", "--n", "512", "--seed", "0"]);
    assert_eq!(out.stdout, with_seed.stdout);
}

#[test]
fn sweep_writes_tidy_csv() {
    let dir = TempDir::new().unwrap();
    let x = path(&dir, "nls.txt");
    let csv = path(&dir, "out.csv");
    ok(&["gen", "--preset", "NLS", "--n", "2048", "--seed", "7", "-o", s(&x)]);
    let out = ok(&[
        "sweep", "-i", s(&x), "--fc-min", "50", "--grid", "10", "--m", "99", "--seed", "1", "-o", s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "fc,stat,data_value,p5,p50,p95,reject,linearity_preserved"
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 20);
    let ac: Vec<_> = rows.iter().filter(|r| r[1] == "AC").collect();
    let ami: Vec<_> = rows.iter().filter(|r| r[1] != "AC").collect();
    assert_eq!((ac.len(), ami.len()), (10, 10));
    let fcs: Vec<usize> = ami.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(fcs[0], 50);
    assert_eq!(fcs[9], 2048 / 2 - 10);
    assert!(fcs.windows(2).all(|w| w[0] < w[1]));
    for r in &rows {
        let band: Vec<f64> = r[3..6].iter().map(|v| v.parse().unwrap()).collect();
        assert!(band[0] <= band[1] && band[1] <= band[2], "{r:?}");
        assert!(["true", "false"].contains(&r[6].as_str()));
    }
    // The nonlinear map is rejected across the low and middle cutoffs.
    let rejected = ami[..8].iter().filter(|r| r[6] == "true" || r[7] == "false").count();
    assert_eq!(rejected, 8, "{ami:?}");
    let meta = json(&path(&dir, "out.csv.meta.json"));
    assert_eq!(meta["command"], "sweep");
    assert_eq!(meta["seed"], 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("classification"));
}

#[test]
fn aa_bpr_surrogate_keeps_values() {
    let dir = TempDir::new().unwrap();
    let x = path(&dir, "x.txt");
    ok(&["gen", "--preset", "LS", "--seed", "2", "--preprocess", "-o", s(&x)]);
    let out = ok(&["surrogate", "-i", s(&x), "--method", "aa_bpr", "--fc", "360", "--seed", "3"]);
    let data = values(&std::fs::read_to_string(&x).unwrap());
    let surr = values(&String::from_utf8(out.stdout.clone()).unwrap());
    assert_ne!(data, surr);
    assert_eq!(sorted_bits(data), sorted_bits(surr));
    // Metadata goes to stderr when the result goes to stdout.
    let stderr = String::from_utf8(out.stderr).unwrap();
    let meta: serde_json::Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(meta["parameters"]["spec"]["fc"], 360);
    assert!(meta["parameters"]["refinement"]["iterations"].as_u64().unwrap() >= 1);
}

#[test]
fn output_independent_of_thread_count() {
    let dir = TempDir::new().unwrap();
    let x = path(&dir, "x.txt");
    ok(&["gen", "--preset", "LNS", "--n", "512", "--seed", "4", "-o", s(&x)]);
    let args = ["test", "-i", s(&x), "--fc", "40", "--m", "19", "--seed", "5"];
    let runs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|t| {
            let out = bin().args(args).env("RAYON_NUM_THREADS", t).output().unwrap();
            assert!(out.status.success());
            out.stdout
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let doc: serde_json::Value = serde_json::from_slice(&runs[0]).unwrap();
    assert_eq!(doc["metadata"]["command"], "test");
    assert_eq!(doc["result"]["surrogate_values"].as_array().unwrap().len(), 19);
}

#[test]
fn stats_and_power_documents() {
    let dir = TempDir::new().unwrap();
    let x = path(&dir, "x.txt");
    std::fs::write(&x, "# rr\n").unwrap();
    let rr: String = (0..300).map(|i| format!("{}\n", 0.8 + 0.05 * (i as f64 * 0.3).sin())).collect();
    std::fs::write(&x, rr).unwrap();
    let st = path(&dir, "stats.json");
    ok(&["stats", "-i", s(&x), "--window", "50", "-o", s(&st)]);
    let doc = json(&st);
    assert_eq!(doc["result"]["len"], 300);
    assert_eq!(doc["result"]["statistics"].as_array().unwrap().len(), 2);
    assert!(doc["result"]["local_moments"].is_object());

    let pw = path(&dir, "power.json");
    ok(&[
        "power", "--null", "LS", "--alternative", "NLS", "--n", "512", "--m", "19", "--trials", "20",
        "--seed", "3", "-o", s(&pw),
    ]);
    let doc = json(&pw);
    assert_eq!(doc["result"]["trials"], 20);
    let alpha = doc["result"]["alpha_hat"].as_f64().unwrap();
    let beta = doc["result"]["beta_hat"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&beta));
}

#[test]
fn out_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["gen", "--preset", "LS", "--n", "512", "--seed", "1", "-o", "rel.txt"])
        .env("BANDPHASE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(path(&dir, "rel.txt").exists());
    assert!(path(&dir, "rel.txt.meta.json").exists());
}

#[test]
fn validation_errors_exit_one_and_write_nothing() {
    let dir = TempDir::new().unwrap();
    let x = path(&dir, "x.txt");
    ok(&["gen", "--preset", "LS", "--n", "512", "--seed", "1", "-o", s(&x)]);
    let target = path(&dir, "out.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["surrogate", "-i", s(&x), "--fc", "5000", "-o", s(&target)],
        vec!["surrogate", "-i", s(&x), "--method", "nope", "-o", s(&target)],
        vec!["test", "-i", s(&x), "--m", "5", "-o", s(&target)],
        vec!["sweep", "-i", s(&x), "--fc-min", "300", "--fc-max", "100", "-o", s(&target)],
        vec!["surrogate", "-i", "/nonexistent/series.txt", "-o", s(&target)],
        vec!["gen", "--preset", "XX", "-o", s(&target)],
        vec!["gen", "--preset", "LS", "--n", "10", "-o", s(&target)],
        vec!["power", "--m", "19", "-o", s(&target)],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
        assert!(!target.exists(), "{args:?} left output behind");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn runtime_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let blocker = path(&dir, "file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out.txt");
    let out = run(&["gen", "--preset", "LS", "--n", "512", "--seed", "1", "-o", s(&target)]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&blocker).unwrap(), b"x");
}

#[test]
fn help_and_version_succeed() {
    for sub in ["gen", "surrogate", "stats", "test", "sweep", "power"] {
        assert!(String::from_utf8(ok(&[sub, "--help"]).stdout).unwrap().contains("--seed"));
    }
    assert!(ok(&["--version"]).status.success());
}
