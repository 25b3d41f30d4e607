//! End-to-end checks of the command-line surface and its file outputs.

use std::fs;
use std::path::Path;
use std::process::Command;

fn dgpc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dgpc"))
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn run_prints_report_and_honors_flag_overrides() {
    let out = dgpc()
        .args(["run", "--n", "3", "--k", "1", "--nx", "10", "--filter", "2,2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("N=3 k=1 Nx=10"), "stdout: {text}");
    assert!(text.contains("siac(2,2)"), "stdout: {text}");
}

#[test]
fn run_reads_config_file_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("case.json");
    fs::write(&config, r#"{"n": 4, "k": 1, "nx": 20, "cfl": 0.05}"#).unwrap();
    let out = dgpc()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--nx", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("N=4 k=1 Nx=10"), "flag should override file: {text}");
    assert!(text.contains("cfl=0.05"), "file value should survive: {text}");
}

#[test]
fn study_emits_all_five_measure_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.json");
    fs::write(
        &config,
        r#"{
            "base": {"n": 3, "k": 1, "nx": 10},
            "n_values": [3],
            "k_values": [1],
            "meshes": [10, 20],
            "filter": {"Fixed": {"r": 2, "ell": 2}}
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("tables");
    let out = dgpc()
        .args(["study", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for measure in ["mean_square", "mean_l2", "mean_linf", "var_l2", "var_linf"] {
        let csv = read(&out_dir, &format!("{measure}.csv"));
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "N,k,Nx,error_unfiltered,order_unfiltered,error_filtered,order_filtered"
        );
        assert_eq!(lines.count(), 2, "one row per mesh in {measure}.csv");
    }
    let manifest = read(&out_dir, "manifest.json");
    let parsed: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 2);
    assert!(parsed["config_hash"].as_str().unwrap().len() == 16);
    assert!(parsed["rows"][0]["wall_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn sweep_emits_curves_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgpc()
        .args(["sweep", "--n", "3", "--k", "1", "--nx", "16", "--vary", "r", "--values", "0,2"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for r in [0, 2] {
        let curve = read(dir.path(), &format!("curve_mean_N3_k1_Nx16_r{r}_l2.csv"));
        let mut lines = curve.lines();
        assert_eq!(lines.next().unwrap(), "x,error_unfiltered,error_filtered");
        assert_eq!(lines.count(), 160, "10 samples per cell");
    }
}

#[test]
fn bad_arguments_fail_with_nonzero_exit() {
    let out = dgpc().args(["sweep", "--vary", "q", "--values", "1"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--vary"));

    let out = dgpc().args(["run", "--filter", "nonsense"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("filter"));
}

#[test]
fn worker_count_env_is_accepted() {
    let out = dgpc()
        .env("DGPC_THREADS", "2")
        .args(["run", "--n", "2", "--k", "1", "--nx", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
}
