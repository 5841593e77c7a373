use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn euler_spin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euler-spin"))
        .args(args)
        .env_remove("EULER_SPIN_CONFIG")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn negative_dt_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"command":"classical","dt":-0.1,"T":1.0}"#);
    let o = euler_spin(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dt must be positive"));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"command":"spectrum","two_s":1,"I1":1,"I3":1,"I2":1}"#);
    let o = euler_spin(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`I2`"));
    let o = euler_spin(&["spectrum", "--two-s", "1", "--I1", "1", "--I3", "1", "--set", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_command_is_a_config_error() {
    let o = euler_spin(&["run"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classical_writes_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"field":"uniform-static","b":[0,0,1],"v0":[0.1,0.2,0],"omega0":[0.3,0,1],"dt":0.01,"T":0.5}"#,
    );
    let out = dir.path().join("traj.csv");
    let o = euler_spin(&["classical", "--config", &cfg, "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,X1,X2,X3,V1,V2,V3,w1,w2,w3,KE_trans,KE_rot,H,spin_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 51);
    assert!(rows.iter().all(|r| r.len() == 14));
    // KE is conserved in a uniform magnetic field
    let ke0 = rows[0][10] + rows[0][11];
    assert!(rows.iter().all(|r| ((r[10] + r[11]) - ke0).abs() < 1e-12));
    assert_eq!(rows.last().unwrap()[0], 0.5);
}

#[test]
fn numbers_use_seventeen_significant_digits() {
    let o = euler_spin(&["spectrum", "--two-s", "1", "--I1", "2", "--I3", "1"]);
    let text = stdout(&o);
    let first = text.lines().nth(1).unwrap();
    // E = ½[¾/2 + (1 − ½)/4] = 0.25
    assert_eq!(first, "5.0000000000000000e-1,5.0000000000000000e-1,2.5000000000000000e-1");
}

#[test]
fn spectrum_of_spin_three_halves() {
    let o = euler_spin(&["spectrum", "--two-s", "3", "--I1", "1", "--I3", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,mbar,E"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    // E = ½[15/4 + m̄²]
    let expect = [(1.5, 3.0), (0.5, 2.0), (-0.5, 2.0), (-1.5, 3.0)];
    assert_eq!(rows.len(), 4);
    for (r, (mbar, e)) in rows.iter().zip(expect) {
        assert_eq!(r[0], 1.5);
        assert_eq!(r[1], mbar);
        assert!((r[2] - e).abs() < 1e-15, "{r:?}");
    }
}

#[test]
fn ring_prints_json() {
    let o = euler_spin(&["ring", "--m-grams", "1e-27", "--a-fm", "0.01"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["lambda"].as_f64().unwrap() >= 1e4);
    assert!(v["one_minus_beta"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["units"], "cgs");
    let o = euler_spin(&["ring", "--m-grams", "1.8e-24", "--a-fm", "1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["beta"].as_f64().unwrap() <= 0.1);
}

#[test]
fn g_factor_of_shell_charge_over_ball_mass() {
    let o = euler_spin(&[
        "g-factor",
        "--set",
        r#"charge_profile={"kind":"thin-shell","radius":1}"#,
        "--set",
        r#"mass_profile={"kind":"uniform-ball","radius":1}"#,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["g"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-10);
    assert!((v["inertia"].as_f64().unwrap() - 0.4).abs() < 1e-10);
}

#[test]
fn env_var_supplies_the_config_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"command":"spectrum","two_s":0,"I1":1,"I3":1}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_euler-spin"))
        .arg("run")
        .env("EULER_SPIN_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o), "s,mbar,E\n0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0\n");
}

#[test]
fn flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"two_s":1,"I1":1,"I3":1}"#);
    let o = euler_spin(&["spectrum", "--config", &cfg, "--set", "two_s=2", "--two-s", "4"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

fn spin_csv(args: &[&str]) -> Vec<Vec<f64>> {
    let o = euler_spin(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,re_a0,im_a0,re_a1,im_a1,S1,S2,S3,norm"));
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn spin_evolve_precesses_and_keeps_norm() {
    let rows = spin_csv(&[
        "spin-evolve",
        "--dt",
        "0.01",
        "-T",
        "2",
        "--set",
        "b=[1,0,0]",
        "--set",
        "gtilde=1",
        "--set",
        "hbar=1",
    ]);
    assert_eq!(rows.len(), 201);
    for r in &rows {
        assert!((r[8] - 1.0).abs() < 1e-12);
        // ⟨S₃⟩ = ½cos t about B along axis 1
        assert!((r[7] - 0.5 * r[0].cos()).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn spin_sector_choice_does_not_change_the_dynamics() {
    let base = ["spin-evolve", "--dt", "0.05", "-T", "1", "--set", "b=[0.3,0.4,1]", "--set", "gtilde=0.9"];
    let algebraic = spin_csv(&base);
    for mbar in ["--two-mbar=1", "--two-mbar=-1"] {
        let mut args = base.to_vec();
        args.push(mbar);
        let projected = spin_csv(&args);
        for (a, p) in algebraic.iter().zip(&projected) {
            for (x, y) in a.iter().zip(p) {
                assert!((x - y).abs() < 1e-10, "{a:?} vs {p:?}");
            }
        }
    }
    let o = euler_spin(&["spin-evolve", "--dt", "0.1", "-T", "1", "--two-mbar", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = euler_spin(&["verify", "--seed", "42", "-o", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ra = std::fs::read(&a).unwrap();
    assert_eq!(ra, std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 14);
    let mut criteria: Vec<u64> = checks.iter().map(|c| c["criterion"].as_u64().unwrap()).collect();
    criteria.dedup();
    assert_eq!(criteria, (1..=14).collect::<Vec<_>>());
}

#[test]
fn impossible_tolerance_fails_verification() {
    let o = euler_spin(&["verify", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
}
