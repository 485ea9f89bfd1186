use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn optoforce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optoforce"))
        .args(args)
        .output()
        .unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[drive]\nmodulation_dept = 0.5\n").unwrap();
    let out = optoforce(&["simulate", "--config", arg(&cfg), "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("modulation_dept"), "{err}");
    assert!(err.contains("bad.toml"), "{err}");
}

#[test]
fn seed_beyond_signed_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = optoforce(&[
        "sensitivity",
        "--seed",
        &u64::MAX.to_string(),
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_physics_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("neg.toml");
    fs::write(&cfg, "[particle]\nradius = -1e-9\n").unwrap();
    let out = optoforce(&[
        "sensitivity",
        "--config",
        arg(&cfg),
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn manifest_rerun_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = optoforce(&[
        "simulate",
        "--scenario",
        "fig2",
        "--seed",
        "11",
        "--out",
        arg(&a),
    ]);
    assert!(first.status.success());
    let manifest = a.join("manifest.toml");
    let again = optoforce(&["simulate", "--config", arg(&manifest), "--out", arg(&b)]);
    assert!(
        again.status.success(),
        "{}",
        String::from_utf8_lossy(&again.stderr)
    );
    for name in ["fig2_psd.csv", "summary.csv", "manifest.toml"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("[provenance]"));
    assert!(text.contains("seed = 11"));
}

#[test]
fn projection_table_has_si_headers_and_unix_newlines() {
    let dir = tempfile::tempdir().unwrap();
    let out = optoforce(&["simulate", "--scenario", "fig5", "--out", arg(dir.path())]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("fig5_projection.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "signal_power_W,force_co_N,force_counter_N,threshold_N,counter_over_co"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 66);
    assert!(rows.iter().all(|r| r[4] >= 50.0));
}

#[test]
fn json_format_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = optoforce(&["sensitivity", "--format", "json", "--out", arg(dir.path())]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sensitivity.json")).unwrap())
            .unwrap();
    assert_eq!(v["columns"][0], "label");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);

    let report = optoforce(&["report", "--out", arg(dir.path())]);
    assert!(report.status.success());
    assert!(String::from_utf8_lossy(&report.stdout).contains("measured_over_predicted"));

    let missing = optoforce(&["report", "--out", arg(&dir.path().join("nope"))]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn pressure_accepts_mbar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.toml");
    fs::write(
        &cfg,
        "scenario = \"fig5\"\n[projection]\npressure = \"1e-6 mbar\"\n",
    )
    .unwrap();
    let out = optoforce(&["simulate", "--config", arg(&cfg), "--out", arg(dir.path())]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    let table: toml::Table = toml::from_str(&manifest).unwrap();
    let p = table["projection"]["pressure"].as_float().unwrap();
    assert!((p - 1e-4).abs() < 1e-18);
}
