// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end runs of the `cqed` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn reference() -> Value {
    json!({
        "optical": [{ "h_r_mhz": 34.0, "h_l_mhz": 34.0, "gamma_mhz": 2.6, "kappa_mhz": 4.1 }],
        "microwave": { "g_mhz": 0.05, "delta_mhz": 0.25, "fock_cutoff": 8 },
        "sweep": {
            "success": {
                "h_mhz": 34.0,
                "gamma_mhz": { "start": 2.6, "stop": 7.1, "points": 10 },
                "kappa_mhz": { "start": 4.1, "stop": 8.6, "points": 10 }
            },
            "stagger": { "dt_over_t0": { "start": 0.0, "stop": 0.05, "points": 6 }, "n_atoms": [2, 3] }
        }
    })
}

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn config(&self, cfg: &Value) -> PathBuf {
        let path = self.dir.path().join("config.json");
        fs::write(&path, serde_json::to_vec_pretty(cfg).unwrap()).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Runs with `cfg` and writes the output to `out`.
    fn cqed(&self, cfg: &Value, args: &[&str], out: &str) -> Output {
        let config = self.config(cfg);
        let out = self.path(out);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cqed"));
        cmd.args(args).arg("--config").arg(&config).arg("--out").arg(&out).env_remove("CQED_CONFIG_DIR");
        cmd.output().unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_slice(&fs::read(self.path(name)).unwrap()).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn bell_reference_report() {
    let run = Run::new();
    let o = run.cqed(&reference(), &["bell"], "bell.json");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = run.json("bell.json");
    let p = r["success_probability"].as_f64().unwrap();
    assert!((p - 0.481).abs() <= 0.003, "P = {p}");
    let outcomes = r["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 4);
    for o in outcomes {
        assert!((o["probability"].as_f64().unwrap() - 0.25).abs() < 1e-10);
        assert!(o["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
        assert_eq!(o["photon_amplitudes"].as_array().unwrap().len(), 4);
    }
    let labels: Vec<&str> = outcomes.iter().map(|o| o["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["phi-i", "psi-i", "psi+i", "phi+i"]);
    // Canonical parameters and the plan that fixed the drive are embedded.
    let plan = &r["parameters"]["plan"];
    let lambda = r["couplings"]["lambda"].as_f64().unwrap();
    assert!((lambda * plan["t0"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert_eq!(r["parameters"]["microwave"]["big_g"], plan["g_required"]);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 0);
}

#[test]
fn inefficient_regime_warns_but_succeeds() {
    let run = Run::new();
    let mut cfg = reference();
    cfg["optical"][0]["gamma_mhz"] = json!(10.0);
    let o = run.cqed(&cfg, &["bell"], "bell.json");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let warnings = run.json("bell.json")["warnings"].as_array().unwrap().clone();
    assert!(!warnings.is_empty());
    assert!(warnings[0].as_str().unwrap().contains("γ/2 < κ"));
}

#[test]
fn overdamped_cavity_is_a_regime_error() {
    let run = Run::new();
    let mut cfg = reference();
    cfg["optical"][0]["gamma_mhz"] = json!(200.0);
    let o = run.cqed(&cfg, &["bell"], "bell.json");
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("overdamped"));
    assert!(!run.path("bell.json").exists());
}

#[test]
fn malformed_config_reports_key_path() {
    let run = Run::new();
    let mut cfg = reference();
    cfg["microwave"]["detuning_mhz"] = json!(1.0);
    let o = run.cqed(&cfg, &["bell"], "bell.json");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("microwave.detuning_mhz"), "{}", stderr(&o));

    let mut cfg = reference();
    cfg["sweep"]["success"]["kappa_mhz"]["points"] = json!("ten");
    let o = run.cqed(&cfg, &["sweep", "--kind", "success"], "t.csv");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sweep.success.kappa_mhz.points"), "{}", stderr(&o));

    let mut cfg = reference();
    cfg["microwave"].as_object_mut().unwrap().remove("g_mhz");
    let o = run.cqed(&cfg, &["bell"], "bell.json");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("g_mhz"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_a_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_cqed")).arg("bell").env_remove("CQED_CONFIG_DIR").output().unwrap();
    assert_eq!(code(&out), 2);
    let out =
        Command::new(env!("CARGO_BIN_EXE_cqed")).args(["bell", "--config", "/nonexistent/cqed.json"]).output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn config_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cqed.json"), serde_json::to_vec(&reference()).unwrap()).unwrap();
    let out_path = dir.path().join("bell.json");
    let o = Command::new(env!("CARGO_BIN_EXE_cqed"))
        .args(["bell", "--seedless", "--out"])
        .arg(&out_path)
        .env("CQED_CONFIG_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out_path.exists());
}

#[test]
fn ghz_three_atoms() {
    let run = Run::new();
    let o = run.cqed(&reference(), &["ghz", "--n", "3"], "ghz.json");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = run.json("ghz.json");
    let outcomes = r["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 8);
    for o in outcomes {
        assert!(o["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
        assert!(o["label"].as_str().unwrap().starts_with("ghz("));
    }
    assert_eq!(r["parameters"]["plan"]["parity"], "odd");
    assert_eq!(r["parameters"]["optical"].as_array().unwrap().len(), 3);
}

#[test]
fn ghz_two_atoms_matches_bell() {
    let run = Run::new();
    assert_eq!(code(&run.cqed(&reference(), &["bell"], "bell.json")), 0);
    assert_eq!(code(&run.cqed(&reference(), &["ghz", "--n", "2"], "ghz.json")), 0);
    let (bell, ghz) = (run.json("bell.json"), run.json("ghz.json"));
    for key in ["parameters", "couplings", "outcomes", "success_probability", "complete_set"] {
        assert_eq!(bell[key], ghz[key], "{key}");
    }
}

#[test]
fn ghz_outside_budget_is_rejected() {
    let run = Run::new();
    for n in ["1", "5"] {
        let o = run.cqed(&reference(), &["ghz", "--n", n], "ghz.json");
        assert_eq!(code(&o), 2, "n = {n}");
        assert!(stderr(&o).contains("budget"));
    }
}

#[test]
fn driveless_heralds_only_psi_states() {
    let run = Run::new();
    let mut cfg = reference();
    cfg["drive"] = json!("driveless");
    let o = run.cqed(&cfg, &["bell"], "bell.json");
    // The gg and ee outcomes herald product states, so the fidelity gate fails.
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let r = run.json("bell.json");
    for o in r["outcomes"].as_array().unwrap() {
        let f = o["fidelity"].as_f64().unwrap();
        match o["pattern"].as_str().unwrap() {
            "ge" | "eg" => {
                assert!(f >= 1.0 - 1e-9);
                assert_eq!(o["family"], "psi");
            }
            _ => assert!((f - 0.5).abs() < 1e-9),
        }
    }
    assert_eq!(r["parameters"]["microwave"]["big_g"], 0.0);
}

#[test]
fn verify_reports_ratios_and_every_check() {
    let run = Run::new();
    let o = run.cqed(&reference(), &["verify"], "verify.json");
    let r = run.json("verify.json");
    let passed = r["passed"].as_bool().unwrap();
    assert_eq!(code(&o), if passed { 0 } else { 1 }, "{}", stderr(&o));
    assert!((r["ratios"]["delta_over_g"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert!((r["ratios"]["drive_over_g"].as_f64().unwrap() - 50.0).abs() < 1e-9);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["lab_to_interaction", "interaction_to_dressed", "dressed_to_strong_driving", "interaction_to_effective"]
    );
    // Frame changes are exact identities.
    for c in &r["checks"].as_array().unwrap()[..2] {
        assert!(c["fidelity"].as_f64().unwrap() >= 1.0 - 1e-6);
    }
    let fock: Vec<u64> = r["dispersive"].as_array().unwrap().iter().map(|d| d["fock_n"].as_u64().unwrap()).collect();
    assert_eq!(fock, [0, 1, 2]);
    assert_eq!(r["fock_independence"].as_array().unwrap().len(), 3);
    assert_eq!(r["timing_plan"]["parity"], "even");
}

#[test]
fn verify_without_coupling_is_trivially_faithful() {
    let run = Run::new();
    let mut cfg = reference();
    cfg["microwave"]["g_mhz"] = json!(0.0);
    let o = run.cqed(&cfg, &["verify"], "verify.json");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = run.json("verify.json");
    assert!(r["timing_plan"].is_null());
    assert!(r["ratios"]["drive_over_g"].is_null());
    let all = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .chain(r["dispersive"].as_array().unwrap())
        .chain(r["fock_independence"].as_array().unwrap())
        .map(|c| c["fidelity"].as_f64().unwrap())
        .collect::<Vec<_>>();
    assert_eq!(all.len(), 10);
    assert!(all.iter().all(|&f| (f - 1.0).abs() < 1e-6), "{all:?}");
}

#[test]
fn verify_needs_room_above_fock_two() {
    let run = Run::new();
    let mut cfg = reference();
    cfg["microwave"]["fock_cutoff"] = json!(1);
    let o = run.cqed(&cfg, &["verify"], "verify.json");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cutoff"));
}

#[test]
fn success_sweep_table() {
    let run = Run::new();
    let o = run.cqed(&reference(), &["sweep", "--kind", "success"], "success.csv");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = csv_rows(&run.path("success.csv"));
    assert_eq!(header, ["gamma_mhz", "kappa_mhz", "tau_us", "p_single", "p_total"]);
    assert_eq!(rows.len(), 100);
    assert_eq!(&rows[0][..2], ["2.6", "4.1"]);
    let raw = fs::read_to_string(run.path("success.csv")).unwrap();
    assert!(raw.ends_with("\r\n"));

    // The reference point agrees with the full protocol run.
    assert_eq!(code(&run.cqed(&reference(), &["bell"], "bell.json")), 0);
    let p_bell = run.json("bell.json")["success_probability"].as_f64().unwrap();
    let p_row: f64 = rows[0][4].parse().unwrap();
    assert!((p_row - p_bell).abs() <= 1e-11, "{p_row} vs {p_bell}");
    let tau: f64 = rows[0][2].parse().unwrap();
    assert!((tau * 1e3 - 10.8).abs() <= 0.1);
}

#[test]
fn stagger_sweep_table() {
    let run = Run::new();
    let o = run.cqed(&reference(), &["sweep", "--kind", "stagger"], "stagger.csv");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = csv_rows(&run.path("stagger.csv"));
    assert_eq!(header, ["dt_over_t0", "n_atoms", "G_rad_per_us", "infid_analytic", "infid_sim"]);
    assert_eq!(rows.len(), 12);
    for row in &rows {
        let sim: f64 = row[4].parse().unwrap();
        match row[1].as_str() {
            "2" => assert!((row[3].parse::<f64>().unwrap() - sim).abs() <= 1e-3),
            "3" => assert_eq!(row[3], ""),
            other => panic!("unexpected atom count {other}"),
        }
    }
    assert!(rows[0][4].parse::<f64>().unwrap() <= 1e-10);
}

#[test]
fn sweep_requires_its_section() {
    let run = Run::new();
    let mut cfg = reference();
    cfg.as_object_mut().unwrap().remove("sweep");
    let o = run.cqed(&cfg, &["sweep", "--kind", "stagger"], "t.csv");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sweep.stagger"));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let run = Run::new();
    for (args, a, b) in [
        (&["sweep", "--kind", "success"][..], "a.csv", "b.csv"),
        (&["sweep", "--kind", "stagger"][..], "c.csv", "d.csv"),
        (&["bell"][..], "a.json", "b.json"),
    ] {
        assert_eq!(code(&run.cqed(&reference(), args, a)), 0);
        assert_eq!(code(&run.cqed(&reference(), args, b)), 0);
        assert_eq!(fs::read(run.path(a)).unwrap(), fs::read(run.path(b)).unwrap(), "{args:?}");
    }
}
