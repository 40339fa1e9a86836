use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "[grid]
n_points = 8

[sim]
dt = 1e-3
t_end = 0.05
output_every = 10

[output]
snapshot_every = 1
";

fn expdamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expdamp"))
        .args(args)
        .output()
        .expect("spawn expdamp")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn simulate_writes_ledger_and_passes_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = expdamp(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["passed"], true);

    let ledger = out_dir.join("ledger.csv");
    let text = fs::read_to_string(&ledger).unwrap();
    assert!(text.starts_with("# [grid]"), "config echo missing");
    assert!(text.contains("t,energy,visc_cum,damp_cum,residual,saturation_count"));
    assert!(out_dir.join("final.nsd").exists());
    assert!(out_dir.join("snapshot_0000.nsd").exists());
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary["config"].as_str().unwrap().contains("n_points = 8"));

    let v = expdamp(&["verify-energy", "--ledger", ledger.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout_json(&v)["passed"], true);
}

#[test]
fn corrupted_ledger_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    // energy rises between the last two rows
    fs::write(
        &path,
        "t,energy,visc_cum,damp_cum,residual,saturation_count\n\
         0.0,1.0,0.0,0.0,0.0,0\n\
         0.1,0.9,0.05,0.05,0.0,0\n\
         0.2,0.95,0.06,0.06,-0.07,0\n",
    )
    .unwrap();
    let out = expdamp(&["verify-energy", "--ledger", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], false);
    let failures = v["energy"]["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f.as_str().unwrap().starts_with("row 2")));
}

#[test]
fn malformed_ledger_is_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "time,e\n0,1\n").unwrap();
    let out = expdamp(&["verify-energy", "--ledger", path.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ledger_format");
}

#[test]
fn lemma_check_passes() {
    let out = expdamp(&["lemma-check", "--samples", "20000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["min_normalized_gap"].as_f64().unwrap() >= -1e-12);
}

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nn_points = 8\nbogus = 1\n");
    let out = expdamp(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
    let msg = err["message"].as_str().unwrap();
    assert!(msg.contains("line 3") && msg.contains("bogus"), "{msg}");
}

#[test]
fn radius_above_dealiasing_bound_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nn_points = 8\ntrunc_radius = 3.5\n");
    let out = expdamp(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(expdamp(&[]).status.code(), Some(2));
}

#[test]
fn stability_and_oracle_compare_pass_on_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();

    let s = expdamp(&["stability", "--config", &cfg, "--out", o]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(stdout_json(&s)["min_margin"].as_f64().unwrap() >= -1e-8);
    assert!(fs::read_to_string(out_dir.join("stability.csv")).unwrap().starts_with("# [grid]"));

    let c = expdamp(&[
        "oracle-compare",
        "--config",
        &cfg,
        "--out",
        o,
        "--override",
        "initial.kind=random",
        "--override",
        "initial.amplitude=0.1",
    ]);
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stderr));
    let v = stdout_json(&c);
    assert!(v["transport_relative_diff"].as_f64().unwrap() <= 1e-12);
    assert!(v["endpoint_relative_diff"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn decay_and_sweep_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}\n[sweep]\nr_values = 2, 4\n"));
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();

    let d = expdamp(&["decay", "--config", &cfg, "--out", o]);
    assert_eq!(d.status.code(), Some(0), "{}", String::from_utf8_lossy(&d.stderr));
    assert_eq!(stdout_json(&d)["h_neg2_strictly_decreasing"], true);
    assert!(out_dir.join("decay.csv").exists());

    let s = expdamp(&["sweep", "--config", &cfg, "--out", o]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    assert_eq!(stdout_json(&s)["runs"], 2);
    let table = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert!(table.contains("r,trunc_radius,half_life"));
}
