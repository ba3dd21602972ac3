//! End-to-end checks of the manifest runner binary: exit codes,
//! determinism of emitted artifacts, and strict-mode behavior.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_twotone")
}

fn manifest(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("manifests")
        .join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twotone_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn successful_run_exits_zero_and_writes_summary() {
    let out = temp_dir("ok");
    let status = Command::new(bin())
        .args(["--manifest"])
        .arg(manifest("table_s1.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary = std::fs::read_to_string(out.join("summary.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(parsed["all_passed"], serde_json::Value::Bool(true));
    assert!(out.join("table_s1_estimates.csv").exists());
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn csv_output_uses_header_and_lf_only() {
    let out = temp_dir("csvfmt");
    let status = Command::new(bin())
        .args(["--manifest"])
        .arg(manifest("fig3a.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv =
        std::fs::read_to_string(out.join("fig3a_contrast_at_superresolution_time.csv")).unwrap();
    assert!(csv.starts_with("delta_r_hz,probability,contrast\n"));
    assert!(!csv.contains('\r'));
    assert!(csv.ends_with('\n'));
    // '.' decimal separator: every numeric line parses as f64s.
    for line in csv.lines().skip(1).take(10) {
        for field in line.split(',') {
            field.parse::<f64>().unwrap();
        }
    }
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn identical_seed_reproduces_identical_bytes() {
    let (out1, out2) = (temp_dir("det1"), temp_dir("det2"));
    for out in [&out1, &out2] {
        let status = Command::new(bin())
            .args(["--manifest"])
            .arg(manifest("ssr_trace.json"))
            .arg("--out")
            .arg(out)
            .args(["--seed", "99"])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for name in [
        "ssr_trace_and_dwell_trace.csv",
        "ssr_trace_and_dwell_histogram.csv",
        "readout_budget.csv",
        "summary.json",
    ] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "artifact {name} differs between identical runs");
    }
    // A different seed must change the stochastic artifacts.
    let out3 = temp_dir("det3");
    let status = Command::new(bin())
        .args(["--manifest"])
        .arg(manifest("ssr_trace.json"))
        .arg("--out")
        .arg(&out3)
        .args(["--seed", "100"])
        .status()
        .unwrap();
    assert!(status.code() == Some(0) || status.code() == Some(1));
    let a = std::fs::read(out1.join("ssr_trace_and_dwell_trace.csv")).unwrap();
    let c = std::fs::read(out3.join("ssr_trace_and_dwell_trace.csv")).unwrap();
    assert_ne!(a, c);
    for out in [out1, out2, out3] {
        let _ = std::fs::remove_dir_all(out);
    }
}

#[test]
fn summary_hashes_match_artifact_bytes() {
    use sha2::{Digest, Sha256};
    let out = temp_dir("hash");
    Command::new(bin())
        .args(["--manifest"])
        .arg(manifest("s2_expansion.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let artifacts = summary["reports"][0]["artifacts"].as_array().unwrap();
    assert!(!artifacts.is_empty());
    for artifact in artifacts {
        let path = artifact["path"].as_str().unwrap();
        let bytes = std::fs::read(out.join(path)).unwrap();
        let digest = format!("{:x}", Sha256::digest(&bytes));
        assert_eq!(digest, artifact["sha256"].as_str().unwrap());
    }
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn assertion_failure_exits_one() {
    // A resolution-limit expectation that cannot hold.
    let dir = temp_dir("fail");
    std::fs::create_dir_all(&dir).unwrap();
    let manifest_path = dir.join("bad_expect.json");
    std::fs::write(
        &manifest_path,
        r#"{
  "schema_version": 1,
  "global_seed": 1,
  "scenarios": [
    {
      "name": "impossible_expectation",
      "kind": "resolution_limit",
      "amp_eff_hz": 16850.0,
      "delta_s_hz": 12500.0,
      "time_s": 8.0e-5,
      "gamma_per_s": 769.23,
      "n_exp": 132000,
      "expect_hz": 1.0,
      "tol_rel": 0.01
    }
  ]
}"#,
    )
    .unwrap();
    let status = Command::new(bin())
        .args(["--manifest"])
        .arg(&manifest_path)
        .arg("--out")
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_errors_exit_two() {
    // Missing manifest.
    let status = Command::new(bin())
        .args(["--manifest", "/nonexistent/nowhere.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Duplicate scenario names.
    let dir = temp_dir("dup");
    std::fs::create_dir_all(&dir).unwrap();
    let manifest_path = dir.join("dup.json");
    std::fs::write(
        &manifest_path,
        r#"{
  "schema_version": 1,
  "global_seed": 1,
  "scenarios": [
    {"name": "a", "kind": "expansion_vs_time", "amp_eff_hz": 16850.0,
     "delta_s_hz": 12500.0, "times_s": {"start": 1e-6, "stop": 1e-4, "points": 4}},
    {"name": "a", "kind": "expansion_vs_time", "amp_eff_hz": 16850.0,
     "delta_s_hz": 12500.0, "times_s": {"start": 1e-6, "stop": 1e-4, "points": 4}}
  ]
}"#,
    )
    .unwrap();
    let status = Command::new(bin())
        .args(["--manifest"])
        .arg(&manifest_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Unknown flag.
    let status = Command::new(bin()).args(["--bogus"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn strict_mode_promotes_warnings() {
    // A prob_vs_time config sitting off the superresolution grid warns;
    // --strict makes that fatal (exit 2), the default run succeeds.
    let dir = temp_dir("strict");
    std::fs::create_dir_all(&dir).unwrap();
    let manifest_path = dir.join("warn.json");
    std::fs::write(
        &manifest_path,
        r#"{
  "schema_version": 1,
  "global_seed": 1,
  "scenarios": [
    {
      "name": "off_grid",
      "kind": "prob_vs_time",
      "config": {
        "schema_version": 1,
        "signal": {"amplitude_1_hz": 16850.0, "amplitude_2_hz": 16850.0,
                    "omega_1_hz": 2512250.0, "omega_2_hz": 2512750.0},
        "dd": {"pulse_spacing_s": 2.0e-7, "pulse_count": 512},
        "protocol": {"total_time_s": 1.024e-4, "n_exp": 1}
      },
      "times_s": {"start": 1e-6, "stop": 1.2e-4, "points": 8}
    }
  ]
}"#,
    )
    .unwrap();
    let ok = Command::new(bin())
        .args(["--manifest"])
        .arg(&manifest_path)
        .arg("--out")
        .arg(dir.join("out1"))
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    let strict = Command::new(bin())
        .args(["--manifest"])
        .arg(&manifest_path)
        .arg("--out")
        .arg(dir.join("out2"))
        .arg("--strict")
        .status()
        .unwrap();
    assert_eq!(strict.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn bundled_manifests_complete_within_budget() {
    // Every bundled reproduction manifest runs green, and the whole set
    // stays under the 60 s budget at default sample counts.
    let start = std::time::Instant::now();
    let out = temp_dir("budget");
    for name in [
        "fig3a.json",
        "fig3b.json",
        "fig4.json",
        "s2_expansion.json",
        "s3_divergence.json",
        "table_s1.json",
        "calibration.json",
        "ssr_trace.json",
        "resolution_limit.json",
        "pulse_fidelity.json",
        "oracle_check.json",
    ] {
        let status = Command::new(bin())
            .args(["--manifest"])
            .arg(manifest(name))
            .arg("--out")
            .arg(out.join(name.trim_end_matches(".json")))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "manifest {name} did not pass");
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "bundled manifests took {elapsed:.1} s");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn empty_scenario_list_is_a_successful_run() {
    let dir = temp_dir("empty");
    std::fs::create_dir_all(&dir).unwrap();
    let manifest_path = dir.join("empty.json");
    std::fs::write(
        &manifest_path,
        r#"{"schema_version": 1, "global_seed": 0, "scenarios": []}"#,
    )
    .unwrap();
    let status = Command::new(bin())
        .args(["--manifest"])
        .arg(&manifest_path)
        .arg("--out")
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["all_passed"], serde_json::Value::Bool(true));
    assert_eq!(summary["reports"].as_array().unwrap().len(), 0);
    let _ = std::fs::remove_dir_all(&dir);
}
