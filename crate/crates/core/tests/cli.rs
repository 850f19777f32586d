use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use skelcal::formats::{read_capture, read_profile};
use skelcal::GaitDirection;

fn skelcal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelcal"))
        .args(args)
        .output()
        .expect("failed to spawn skelcal")
}

fn ok(args: &[&str]) -> String {
    let out = skelcal(args);
    assert!(
        out.status.success(),
        "skelcal {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth_gait(dir: &Path, name: &str, lateral: f64, seed: u64) -> (PathBuf, PathBuf) {
    let truth = dir.join(format!("{name}_truth.csv"));
    let raw = dir.join(format!("{name}.csv"));
    ok(&[
        "synth",
        "--tilt-deg",
        "7",
        "--sensor-height",
        "0.75",
        "--beta-coeffs",
        "0,0.031",
        "--noise-std",
        "0.005",
        "--seed",
        &seed.to_string(),
        "--lateral-offset",
        &lateral.to_string(),
        "--out-truth",
        s(&truth),
        "--out-raw",
        s(&raw),
    ]);
    (truth, raw)
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, r1) = synth_gait(dir.path(), "a", 0.1, 9);
    let (t2, r2) = synth_gait(dir.path(), "b", 0.1, 9);
    assert_eq!(std::fs::read(t1).unwrap(), std::fs::read(t2).unwrap());
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());

    let text = std::fs::read_to_string(r1).unwrap();
    assert!(text.starts_with("frame,joint,x,y,z\n"));
    assert_eq!(text.lines().count(), 1 + 90 * 25);
}

#[test]
fn calibrate_apply_diagnose_round() {
    let dir = tempfile::tempdir().unwrap();
    let gaits: Vec<PathBuf> = (0..10)
        .map(|i| synth_gait(dir.path(), &format!("gait{i}"), -0.45 + 0.1 * i as f64, i).1)
        .collect();
    let profile = dir.path().join("profile.json");
    let mut args = vec![
        "calibrate".to_string(),
        "--sensor-height".into(),
        "0.75".into(),
        "--out-profile".into(),
        s(&profile).into(),
    ];
    args.extend(gaits.iter().map(|g| s(g).to_string()));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let summary = ok(&args);
    assert!(summary.contains("from 10 gaits"), "{summary}");

    let p = read_profile(&profile).unwrap();
    assert_eq!(p.gait_count, 10);
    assert!((p.tilt.alpha_g() - 7f64.to_radians().sin().atan()).abs() < 0.01);

    let (_, held) = synth_gait(dir.path(), "held", 0.17, 1000);
    let corrected = dir.path().join("held_corrected.csv");
    let out = skelcal(&[
        "apply",
        "--profile",
        s(&profile),
        "--in",
        s(&held),
        "--out",
        s(&corrected),
    ]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());

    let raw_seq = read_capture(&held, GaitDirection::Vertical).unwrap();
    let fixed = read_capture(&corrected, GaitDirection::Vertical).unwrap();
    assert_eq!(raw_seq.len(), fixed.len());
    let before =
        skelcal::diagnostics::max_y_diff(&raw_seq, &skelcal::perspective::DEFAULT_BETA_JOINTS);
    let after =
        skelcal::diagnostics::max_y_diff(&fixed, &skelcal::perspective::DEFAULT_BETA_JOINTS);
    assert!(
        after <= 0.05 && after * 5.0 <= before,
        "{before} -> {after}"
    );

    // diagnosing raw + profile matches diagnosing the corrected file
    let r1 = dir.path().join("r1.csv");
    let r2 = dir.path().join("r2.csv");
    ok(&[
        "diagnose",
        "--in",
        s(&held),
        "--profile",
        s(&profile),
        "--out",
        s(&r1),
    ]);
    ok(&["diagnose", "--in", s(&corrected), "--out", s(&r2)]);
    let a = std::fs::read_to_string(&r1).unwrap();
    let b = std::fs::read_to_string(&r2).unwrap();
    assert!(a.starts_with("metric,frame,subject,value\n"));
    assert_eq!(a.lines().count(), b.lines().count());

    let ydiff = dir.path().join("ydiff.csv");
    let stdout = ok(&[
        "diagnose",
        "--in",
        s(&held),
        "--report",
        "ydiff",
        "--joints",
        "3,15",
        "--out",
        s(&ydiff),
    ]);
    assert!(stdout.contains("max |y - y_last|"));
    let text = std::fs::read_to_string(ydiff).unwrap();
    assert!(text.lines().skip(1).all(|l| !l.starts_with("bone")));
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(2) == Some("3") || l.split(',').nth(2) == Some("15")));
}

#[test]
fn reapplying_warns() {
    let dir = tempfile::tempdir().unwrap();
    let (_, raw) = synth_gait(dir.path(), "g", 0.0, 1);
    let profile = dir.path().join("p.json");
    ok(&[
        "calibrate",
        "--sensor-height",
        "0.75",
        "--out-profile",
        s(&profile),
        s(&raw),
    ]);
    let once = dir.path().join("g_calibrated.csv");
    ok(&[
        "apply",
        "--profile",
        s(&profile),
        "--in",
        s(&raw),
        "--out",
        s(&once),
    ]);
    let twice = dir.path().join("twice.csv");
    let out = skelcal(&[
        "apply",
        "--profile",
        s(&profile),
        "--in",
        s(&once),
        "--out",
        s(&twice),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let profile = dir.path().join("p.json");

    let out = skelcal(&[
        "calibrate",
        "--sensor-height",
        "0.75",
        "--out-profile",
        s(&profile),
        s(&missing),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert!(!profile.exists());

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "frame,joint,x,y,z\n0,0,0.0,abc,1.0\n").unwrap();
    let out = skelcal(&[
        "calibrate",
        "--sensor-height",
        "0.75",
        "--out-profile",
        s(&profile),
        s(&bad),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let (_, raw) = synth_gait(dir.path(), "g", 0.0, 1);
    let out = skelcal(&[
        "calibrate",
        "--sensor-height",
        "0.75",
        "--degree",
        "9",
        "--out-profile",
        s(&profile),
        s(&raw),
    ]);
    assert!(!out.status.success());

    std::fs::write(&profile, "{\"schema_version\": 1}").unwrap();
    let out = skelcal(&[
        "apply",
        "--profile",
        s(&profile),
        "--in",
        s(&raw),
        "--out",
        s(&dir.path().join("o.csv")),
    ]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let out = skelcal(&[
        "diagnose",
        "--in",
        s(&raw),
        "--joints",
        "30",
        "--out",
        s(&dir.path().join("d.csv")),
    ]);
    assert!(!out.status.success());
}
