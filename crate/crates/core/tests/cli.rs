use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supercavity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_rows_conserve_flux() {
    let csv = stdout(&["spectrum", "--preset", "fig3a", "--no-timestamp"]);
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "k,T,R,flag");
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 801);
    for row in rows {
        let t: f64 = row[1].parse().unwrap();
        let r: f64 = row[2].parse().unwrap();
        assert!((t + r - 1.0).abs() < 1e-10, "{row:?}");
    }
}

#[test]
fn output_is_reproducible_without_timestamp() {
    let a = stdout(&["resonances", "--preset", "fig4a", "--no-timestamp"]);
    let b = stdout(&["resonances", "--preset", "fig4a", "--no-timestamp"]);
    assert_eq!(a, b);
    assert!(!a.contains("generated_unix"));
    assert!(stdout(&["resonances", "--preset", "fig4a"]).contains("# generated_unix="));
}

#[test]
fn json_matches_csv() {
    let csv = stdout(&["resonances", "--preset", "fig7a", "--no-timestamp"]);
    let json: Value = serde_json::from_str(&stdout(&[
        "resonances",
        "--preset",
        "fig7a",
        "--no-timestamp",
        "--format",
        "json",
    ]))
    .unwrap();
    let rows = data_rows(&csv);
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    let columns: Vec<&str> = csv.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let k_re = columns.iter().position(|c| *c == "k_re").unwrap();
    assert_eq!(
        rows[0][k_re].parse::<f64>().unwrap(),
        jrows[0]["k_re"].as_f64().unwrap()
    );
    assert_eq!(json["header"]["config"]["model"], "long");
}

#[test]
fn config_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "model=short\nomega=5\nxi=0.1\nomega1=2\nj1=1\nd=8\nn=1\nparity=odd\n",
    )
    .unwrap();
    let out = dir.path().join("profile.csv");
    stdout(&[
        "profile",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("x,left_re,left_im,right_re,right_im,re,im,left_abs2,right_abs2,abs2,region"));
    assert!(data_rows(&text).len() > 100);
}

#[test]
fn bad_config_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "model=discrete\nomega=5\nxi=-1\nomega1=5\nj1=1\nd=4\n").unwrap();
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("xi"), "{err}");
}

#[test]
fn unknown_preset_is_an_error() {
    let out = run(&["spectrum", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn contour_ridges_are_reported() {
    let csv = stdout(&["profile", "--preset", "fig6a", "--no-timestamp"]);
    assert!(csv.lines().any(|l| l.starts_with("# note: ridge")), "{}", &csv[..500]);
    let rows = data_rows(&csv);
    assert!(rows.iter().all(|r| {
        let v: f64 = r[2].parse().unwrap();
        (0.0..=1.0).contains(&v)
    }));
}

#[test]
fn verify_fast_passes() {
    let out = run(&["verify", "--level", "fast", "--threads", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
