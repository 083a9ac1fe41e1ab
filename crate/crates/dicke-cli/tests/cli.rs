//! End-to-end tests of the `dicke` binary: subcommand outputs, file formats,
//! and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dicke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn assert_csv(text: &str, header: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(lines.next(), Some(header));
    let cols = header.split(',').count();
    lines
        .map(|l| {
            let row: Vec<f64> =
                l.split(',').map(|f| f.parse::<f64>().expect("numeric field")).collect();
            assert_eq!(row.len(), cols, "row width in {l:?}");
            row
        })
        .collect()
}

#[test]
fn steady_reports_known_values() {
    let out = dicke(&["steady", "--n-spins", "1", "-g", "0.5", "--gamma", "0.1"]);
    let v = stdout_json(&out);
    let sz = v["numeric"]["sz"].as_f64().unwrap();
    let n = v["numeric"]["n"].as_f64().unwrap();
    assert!((sz + 0.75).abs() < 1e-8, "sz = {sz}");
    assert!((n - 0.0425).abs() < 1e-8, "n = {n}");
    assert_eq!(v["closed_form"].as_array().unwrap().len(), 1);
    assert!((v["breakdown_coupling"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn steady_without_root_exits_2() {
    let out = dicke(&["steady", "--n-spins", "1", "-g", "1.2", "--gamma", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn malformed_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("point.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = dicke(&["steady", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // Unknown keys are config errors too.
    std::fs::write(&path, r#"{"g": 0.2, "coupling": 0.3}"#).unwrap();
    let out = dicke(&["steady", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = dicke(&["steady", "--config", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("point.json");
    std::fs::write(&path, r#"{"n_spins": 1, "g": 0.9, "gamma": 0.1}"#).unwrap();
    // The -g flag overrides the file's coupling.
    let out = dicke(&["steady", "--config", path.to_str().unwrap(), "-g", "0.5"]);
    let v = stdout_json(&out);
    assert!((v["params"]["g"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!((v["numeric"]["sz"].as_f64().unwrap() + 0.75).abs() < 1e-8);
}

#[test]
fn evolve_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = dicke(&[
        "evolve", "-g", "0.3", "--gamma", "0.1", "--t-final", "10", "--tol", "1e-9", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = assert_csv(&text, "t,sz,n,r,s,qx,px,qy,py,cxx,cyy,czz,cxy");
    assert!(rows.len() > 10);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][1], -1.0); // ground-state inversion
    assert!((rows.last().unwrap()[0] - 10.0).abs() < 1e-9);
}

#[test]
fn evolve_accepts_rk4_and_rejects_unknown_stepper() {
    let ok = dicke(&["evolve", "-g", "0.2", "--t-final", "1", "--stepper", "rk4"]);
    assert!(ok.status.success());
    let bad = dicke(&["evolve", "-g", "0.2", "--t-final", "1", "--stepper", "euler"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn master_single_cutoff_writes_snapshots_and_fock() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.csv");
    let fock = dir.path().join("fock.csv");
    let out = dicke(&[
        "master", "--n-spins", "2", "-g", "0.3", "--gamma", "0.1", "--nmax", "12", "--t-final",
        "5", "--out", snap.to_str().unwrap(), "--fock", fock.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let rows = assert_csv(&std::fs::read_to_string(&snap).unwrap(), "t,sz,n,szsz,sxsx");
    assert_eq!(rows[0][1], -1.0);
    assert!((rows.last().unwrap()[0] - 5.0).abs() < 1e-9);

    let fock_rows = assert_csv(&std::fs::read_to_string(&fock).unwrap(), "t,n,prob");
    // 13 Fock bins per snapshot; each snapshot's probabilities sum to ≈ 1.
    assert_eq!(fock_rows.len(), rows.len() * 13);
    let first_sum: f64 = fock_rows.iter().take(13).map(|r| r[2]).sum();
    assert!((first_sum - 1.0).abs() < 1e-9);
}

#[test]
fn master_multi_cutoff_reports_classification() {
    let out = dicke(&[
        "master", "--n-spins", "1", "-g", "0.3", "--gamma", "0.1", "--nmax", "10,20",
        "--t-final", "50",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["cutoffs"], serde_json::json!([10, 20]));
    assert_eq!(v["n_final"].as_array().unwrap().len(), 2);
    let class = v["classification"].as_str().unwrap();
    assert!(["steady", "breakdown", "inconclusive"].contains(&class));
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{
            "grid": {"sqrt_n_g": [0.2, 0.6], "n_spins": [1, 2]},
            "method": "cumulant",
            "t_final": 200.0,
            "tol": 1e-8
        }"#,
    )
    .unwrap();

    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let out_path = dir.path().join(format!("sweep-{workers}.csv"));
        let out = dicke(&[
            "sweep", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
            "--workers", workers,
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&out_path).unwrap());
        assert!(Path::new(&format!("{}.manifest.json", out_path.display())).exists());
    }
    assert_eq!(outputs[0], outputs[1], "CSV differs between worker counts");

    let text = String::from_utf8(outputs[0].clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(
        lines.next(),
        Some("index,method,n_spins,omega0,omega,g,gamma,kappa,sqrt_n_g,phase,sz,n_over_N,error")
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn sweep_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    let out_path = dir.path().join("out.csv");
    // Master method with a single cutoff is invalid.
    std::fs::write(
        &cfg,
        r#"{
            "grid": {"sqrt_n_g": [0.2], "n_spins": [1]},
            "method": "master",
            "cutoffs": [20],
            "t_final": 10.0,
            "tol": 1e-8
        }"#,
    )
    .unwrap();
    let out = dicke(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spectral_reports_resonance_and_rate() {
    let out = dicke(&["spectral", "--n-spins", "1", "-g", "1.0", "--gamma", "0.1"]);
    let v = stdout_json(&out);
    assert!((v["g_resonance"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["gamma_eff_01"].as_f64().unwrap() - 0.0497512).abs() < 1e-6);
    // On resonance the dressed detuning vanishes.
    assert!(v["delta_minus"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["n_ex"], serde_json::json!(2));
}

#[test]
fn ionmap_forward_and_reverse_round_trip() {
    let dir = tempfile::tempdir().unwrap();

    // Forward: laser settings → model parameters.
    let fwd = dir.path().join("fwd.json");
    std::fs::write(
        &fwd,
        r#"{"delta_r": 0.0, "delta_b": 0.4, "rabi_r": 2.0, "rabi_b": 2.0,
            "lamb_dicke": 0.05, "n_spins": 3}"#,
    )
    .unwrap();
    let v = stdout_json(&dicke(&["ionmap", "--config", fwd.to_str().unwrap()]));
    let model = &v["model"];
    assert!((model["omega0"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((model["omega"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((model["g"].as_f64().unwrap() - 0.1).abs() < 1e-12);

    // Reverse: model parameters → laser settings, closing the loop.
    let rev = dir.path().join("rev.json");
    std::fs::write(
        &rev,
        &format!(r#"{{"model": {}, "lamb_dicke": 0.05}}"#, serde_json::to_string(model).unwrap()),
    )
    .unwrap();
    let v = stdout_json(&dicke(&["ionmap", "--config", rev.to_str().unwrap()]));
    let lasers = &v["lasers"];
    assert!((lasers["delta_r"].as_f64().unwrap() - 0.0).abs() < 1e-12);
    assert!((lasers["delta_b"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((lasers["rabi_r"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    // Missing both blocks is a config error.
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "{}").unwrap();
    assert_eq!(dicke(&["ionmap", "--config", empty.to_str().unwrap()]).status.code(), Some(1));
}
