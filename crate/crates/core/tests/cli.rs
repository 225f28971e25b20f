use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hhl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run hhl")
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn synth_then_decompose_hardy_plus() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let synth = hhl(
        &["synth", "--kind", "paravector", "--n", "2", "--shape", "32,32", "--recipe", "hardy-plus", "--seed", "7", "--out", "s"],
        dir,
    );
    assert_eq!(synth.status.code(), Some(0), "{}", stderr(&synth));
    assert!(dir.join("s/field.hhf").exists());
    assert_eq!(json(dir.join("s/field.json"))["seed"], 7);

    let out = hhl(&["decompose", "--input", "s/field.hhf", "--out", "d"], dir);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json(dir.join("d/report.json"));
    assert!(report["norms"]["minus"].as_f64().unwrap() <= 1e-12);
    assert!(report["norms"]["zero"].as_f64().unwrap() <= 1e-12);
    for name in ["plus.hhf", "minus.hhf", "zero.hhf", "manifest.json"] {
        assert!(dir.join("d").join(name).exists(), "{name}");
    }
    let manifest = json(dir.join("d/manifest.json"));
    assert_eq!(manifest["config"]["command"], "decompose");
    assert_eq!(manifest["newtonSign"], "stated");
}

#[test]
fn scalar_mean_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let synth = hhl(&["synth", "--n", "2", "--shape", "16", "--recipe", "single-mode", "--mode", "0,0", "--out", "c"], dir);
    assert_eq!(synth.status.code(), Some(0), "{}", stderr(&synth));
    let out = hhl(&["decompose", "--input", "c/field.hhf", "--out", "d"], dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("DCViolation"), "{}", stderr(&out));
    let strip = hhl(&["decompose", "--input", "c/field.hhf", "--dc-policy", "strip", "--out", "d"], dir);
    assert_eq!(strip.status.code(), Some(0), "{}", stderr(&strip));
}

#[test]
fn io_and_flag_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(hhl(&["decompose", "--input", "missing.hhf", "--out", "d"], dir).status.code(), Some(2));
    assert_eq!(hhl(&["verify", "--suite", "bogus"], dir).status.code(), Some(2));
    assert_eq!(hhl(&["synth", "--n", "3", "--shape", "8,8", "--out", "x"], dir).status.code(), Some(2));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let args = ["synth", "--kind", "vector", "--n", "2", "--shape", "16,24", "--lengths", "3,5", "--seed", "3", "--out", "a"];
    let read = |name: &str| fs::read(dir.join("a").join(name)).unwrap();
    assert_eq!(hhl(&args, dir).status.code(), Some(0));
    let first = (read("field.hhf"), read("field.json"), read("manifest.json"));
    assert_eq!(hhl(&args, dir).status.code(), Some(0));
    assert_eq!(first, (read("field.hhf"), read("field.json"), read("manifest.json")));
}

#[test]
fn verify_core_on_one_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hhl(&["verify", "--suite", "core", "--n", "2", "--shape", "8,8", "--seeds", "3", "--out", "v"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("reconstruction"));
    assert!(stdout.contains("all checks passed"));
    let report = json(tmp.path().join("v/report.json"));
    assert_eq!(report["suite"], "core");
}

#[test]
fn extend_writes_slab_profiles_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = hhl(
        &["extend", "--n", "2", "--shape", "32", "--recipe", "hardy-plus", "--max-freq", "6", "--heights", "0.4,0.5,0.6", "--p", "2,4", "--out", "e"],
        dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let manifest = json(dir.join("e/manifest.json"));
    assert_eq!(manifest["heights"].as_array().unwrap().len(), 3);
    assert_eq!(manifest["summary"]["newtonSign"], "stated");
    assert!(manifest["summary"]["monogenicityResidual"].as_f64().unwrap() < 0.1);
    let csv = fs::read_to_string(dir.join("e/profile_p4.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.join("e/height_002.hhf").exists());
}

#[test]
fn potential_reports_silence_and_fails_on_strict_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let base = ["potential", "--n", "2", "--shape", "64", "--normal", "0.6,0.8,0", "--offset", "1"];
    let ok = hhl(&[&base[..], &["--out", "p"]].concat(), dir);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let csv = fs::read_to_string(dir.join("p/silence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 25);
    let plane = json(dir.join("p/plane.json"));
    assert_eq!(plane["probesWorld"].as_array().unwrap().len(), 150);
    let report = json(dir.join("p/report.json"));
    assert_eq!(report["side"]["upper"], "minus+zero");

    let strict = hhl(&[&base[..], &["--tol", "1e-9", "--out", "p2"]].concat(), dir);
    assert_eq!(strict.status.code(), Some(1));
    assert!(stderr(&strict).contains("silence ratio"), "{}", stderr(&strict));
}

#[test]
fn quat_split_and_thread_cap() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = Command::new(env!("CARGO_BIN_EXE_hhl"))
        .args(["quat", "--n", "3", "--shape", "16", "--out", "q"])
        .env("HHL_THREADS", "1")
        .current_dir(dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json(dir.join("q/report.json"));
    assert_eq!(report["decomposition"], "quaternionic");
    assert!(report["residuals"]["pythagoras"].as_f64().unwrap() <= 1e-12);

    let bad = Command::new(env!("CARGO_BIN_EXE_hhl"))
        .args(["quat", "--n", "3", "--shape", "8", "--out", "q2"])
        .env("HHL_THREADS", "many")
        .current_dir(dir)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
