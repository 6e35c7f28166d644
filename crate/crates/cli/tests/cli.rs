use std::path::Path;
use std::process::{Command, Output};

fn gmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmc"))
        .args(args)
        .env_remove("GMC_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

#[test]
fn trivial_moment_is_one() {
    let o = gmc(&["moments", "--kernel", "interval", "--mu", "0", "--n", "3"]);
    assert!(o.status.success());
    let v: f64 = column(&stdout(&o), "value")[0].parse().unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    assert_eq!(column(&stdout(&o), "closed_form")[0].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn mellin_integer_moments_match_product() {
    let o = gmc(&["mellin", "--tau", "8", "--lambda", "0.25", "--q", "1", "2", "3", "--format", "json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    for r in rows.as_array().unwrap() {
        assert!(r["rel_diff"].as_f64().unwrap() < 1e-8);
        assert_eq!(r["mu"].as_f64().unwrap(), 0.25);
        assert_eq!(r["status"], "ok");
    }
}

#[test]
fn divergent_cell_becomes_null_with_status() {
    let o = gmc(&["mellin", "--tau", "2.5", "--q", "1", "3", "--format", "json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[1]["re"], serde_json::Value::Null);
    assert!(rows[1]["status"].as_str().unwrap().contains("diverges"));
}

#[test]
fn renormalizability_suite_passes() {
    let o = gmc(&["verify", "--suite", "renormalizability", "--n", "1", "--kernel", "circle"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(column(&stdout(&o), "case"), ["H(1,2)", "H(1,3)", "H(1,4)"]);
    assert!(column(&stdout(&o), "pass").iter().all(|p| p == "true"));
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(gmc(&["moments", "--kernel", "torus", "--mu", "0.1", "--n", "2"]).status.code(), Some(1));
    assert_eq!(gmc(&["mellin", "--mu", "0.5", "--tau", "4", "--q", "1"]).status.code(), Some(1));
    assert_eq!(gmc(&["simulate", "--mu", "0.5", "--grid", "64", "--epsilon", "0.001"]).status.code(), Some(1));
    assert_eq!(gmc(&["nonsense"]).status.code(), Some(1));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "command = mellin\ntau = 6\nq = 1 2\n").unwrap();
    let o = gmc(&["--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(column(&stdout(&o), "tau")[0].parse::<f64>().unwrap(), 6.0);
    let o = gmc(&["--config", cfg.to_str().unwrap(), "--tau", "8"]);
    assert_eq!(column(&stdout(&o), "tau")[1].parse::<f64>().unwrap(), 8.0);
}

fn rerun_from_sidecar(dir: &Path, args: &[&str]) {
    let first = dir.join("a.csv");
    let mut a = args.to_vec();
    a.extend(["--output", first.to_str().unwrap()]);
    assert!(gmc(&a).status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("a.csv.meta.json")).unwrap()).unwrap();
    let lines: Vec<&str> = meta["config"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let cfg = dir.join("again.cfg");
    std::fs::write(&cfg, lines.join("\n")).unwrap();
    let second = dir.join("b.csv");
    let o = gmc(&["--config", cfg.to_str().unwrap(), "--output", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(first).unwrap(), std::fs::read(second).unwrap());
}

#[test]
fn sidecar_reproduces_runs() {
    let dir = tempfile::tempdir().unwrap();
    rerun_from_sidecar(dir.path(), &["mellin", "--mu", "0.25", "--lambda", "0.1", "--q", "0.5", "-0.5", "2"]);
    rerun_from_sidecar(
        dir.path(),
        &["simulate", "--kernel", "interval", "--mu", "0.3", "--grid", "64", "--samples", "300", "--seed", "9"],
    );
}

#[test]
fn sidecar_records_mu_and_tau() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = gmc(&["mellin", "--tau", "4", "--q", "1", "--format", "json", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["mu"].as_f64().unwrap(), 0.5);
    assert_eq!(meta["tau"].as_f64().unwrap(), 4.0);
    assert_eq!(meta["command"], "mellin");
    assert!(meta["version"].is_string());
}

#[test]
fn simulate_writes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("s.bin");
    let o = gmc(&[
        "simulate", "--kernel", "circle", "--mu", "0.5", "--grid", "256", "--samples", "512", "--samples-out",
        bin.to_str().unwrap(), "--threads", "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (s, seed) = gmc_core::gmcsim::read_binary(&bin).unwrap();
    assert_eq!(s.len(), 512);
    assert_eq!(seed, gmc_core::moments::DEFAULT_MC_SEED);
    assert_eq!(column(&stdout(&o), "quantity")[0], "moment_1");
}

#[test]
fn symbolic_expansion_has_no_high_k() {
    let o = gmc(&["expansion", "--symbolic", "--n", "2"]);
    assert!(o.status.success());
    let ks: Vec<usize> = column(&stdout(&o), "k").iter().map(|k| k.parse().unwrap()).collect();
    assert!(!ks.is_empty() && ks.iter().all(|&k| k <= 4));
}
