use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ringcavity::cli::{RunConfig, MANIFEST_NAME, PAPER_CONFIG};
use serde_json::Value;
use sha2::{Digest, Sha256};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringcavity"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_NAME)).unwrap()).unwrap()
}

#[test]
fn spectrum_writes_every_power_and_a_complete_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["spectrum", "--out", "o", "--format", "csv", "--format", "json"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("o");

    let m = manifest(&dir);
    let listed: Vec<String> = m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap().to_string()).collect();
    let mut on_disk: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != MANIFEST_NAME)
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    assert_eq!(listed.len(), 6);

    for f in m["files"].as_array().unwrap() {
        let body = fs::read(dir.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&body)));
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, body.len());
        assert!(!body.contains(&b'\r'));
    }

    let csv = fs::read_to_string(dir.join("spectrum_2mW.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "delta_over_omega_m,nu_p,re_eps_out_plus,im_eps_out_plus");
    assert_eq!(lines.count(), 4001);
    let first: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.5);
    assert_eq!(first[1], first[2]);

    let json: Value = serde_json::from_str(&fs::read_to_string(dir.join("spectrum_15mW.json")).unwrap()).unwrap();
    assert_eq!(json["nu_p"].as_array().unwrap().len(), 4001);
    assert_eq!(m["command"], "spectrum");
    assert_eq!(m["created"], "2023-11-14T22:13:20Z");
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        for cmd in ["stokes", "roots", "features"] {
            assert!(run(&[cmd, "--out", "o", "--format", "csv", "--format", "json"], tmp.path()).status.success());
        }
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(tmp.path().join("o"))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn float_fields_use_seventeen_significant_digits() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(&["roots", "--out", "o", "--format", "csv"], tmp.path()).status.success());
    let csv = fs::read_to_string(tmp.path().join("o/roots.csv")).unwrap();
    let row = csv.lines().nth(2).unwrap();
    for field in row.split(',').filter(|f| *f != "true" && *f != "false") {
        let (mantissa, _) = field.split_once('e').unwrap();
        let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 17, "{field}");
    }
}

#[test]
fn manifest_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "omega_m = 40 MHz\nomega_1 = 1.05 omega_m\nomega_2 = 0.95 omega_m\npower_sweep = 1 uW .. 4 mW : 3 log\ngrid = 0.8 .. 1.2 : 801\n";
    fs::write(tmp.path().join("run.cfg"), cfg).unwrap();
    assert!(run(&["roots", "--config", "run.cfg", "--out", "o"], tmp.path()).status.success());
    let snapshot = manifest(&tmp.path().join("o"))["config"].as_str().unwrap().to_string();
    let mut expected = RunConfig::parse(cfg).unwrap();
    expected.output_dir = "o".into();
    assert_eq!(RunConfig::parse(&snapshot).unwrap(), expected);
    assert_eq!(manifest(&tmp.path().join("o"))["powers_w"].as_array().unwrap().len(), 3);
}

#[test]
fn features_report_contents() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(&["features", "--out", "u", "--format", "json"], tmp.path()).status.success());
    assert!(run(&["features", "--out", "e", "--format", "json", "--equal-frequencies", "--power", "2mW"], tmp.path())
        .status
        .success());
    let read = |d: &str| -> Value { serde_json::from_str(&fs::read_to_string(tmp.path().join(d).join("features.json")).unwrap()).unwrap() };

    let u = read("u");
    assert_eq!(u["normal_coordinates"]["regime"], "central_peak");
    let at_2 = &u["powers"][1];
    let kinds: Vec<&str> = at_2["probe"]["features"].as_array().unwrap().iter().map(|f| f["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["peak", "dip", "peak", "dip", "peak"]);
    assert_eq!(at_2["regime"]["frequency_mode"], "unequal");
    let labels: Vec<&str> = at_2["comparisons"].as_array().unwrap().iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"dip_omega_1_width") && labels.contains(&"central_peak_width"));

    let e = read("e");
    assert_eq!(e["normal_coordinates"]["regime"], "eit_dip");
    assert_eq!(e["normal_coordinates"]["chi_over_omega_m"].as_f64().unwrap(), 0.0);
    let p = &e["powers"][0];
    let dips = p["probe"]["features"].as_array().unwrap().iter().filter(|f| f["kind"] == "dip").count();
    assert_eq!(dips, 1);
    let dip = p["comparisons"].as_array().unwrap().iter().find(|c| c["label"] == "central_dip_width").unwrap();
    assert_eq!(dip["within_tolerance"], true);
}

#[test]
fn blue_detuned_pump_is_reported_unstable() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("blue.cfg"), "effective_detuning = -1 omega_m\npower = 0, 2 mW\n").unwrap();
    assert!(run(&["roots", "--config", "blue.cfg", "--out", "o"], tmp.path()).status.success());
    let csv = fs::read_to_string(tmp.path().join("o/roots.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "stable").unwrap();
    let stable: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(col).unwrap()).collect();
    assert_eq!(stable, ["true", "false"]);
}

#[test]
fn exit_codes_and_no_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(args, tmp.path()).status.code().unwrap();

    fs::write(tmp.path().join("bad.cfg"), "kappa = 15 MHz\nmass_1 = 3 stone\n").unwrap();
    let out = run(&["spectrum", "--config", "bad.cfg", "--out", "bad"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2") && stderr.contains("mass_1"), "{stderr}");

    assert_eq!(code(&["spectrum", "--power", "", "--out", "bad"]), 2);
    assert_eq!(code(&["spectrum", "--power", "2", "--out", "bad"]), 2);
    assert_eq!(code(&["spectrum", "--bogus"]), 2);
    assert_eq!(code(&["roots", "--power", "15mW,2mW", "--out", "bad"]), 3);

    fs::write(tmp.path().join("tight.cfg"), "refine_budget = 10\n").unwrap();
    assert_eq!(code(&["features", "--config", "tight.cfg", "--out", "bad"]), 4);
    fs::write(tmp.path().join("coarse.cfg"), "grid = 0.5 .. 1.5 : 41\nrefine_threshold = 0.9\nprominence_floor = 1e-6\n").unwrap();
    assert_eq!(code(&["features", "--config", "coarse.cfg", "--power", "1uW", "--out", "bad"]), 4);

    assert_eq!(code(&["spectrum", "--config", "nope.cfg"]), 1);
    assert!(!tmp.path().join("bad").exists());
}

#[test]
fn bundled_config_matches_library_defaults() {
    assert_eq!(
        RunConfig::parse(PAPER_CONFIG).unwrap().params().unwrap(),
        ringcavity::SystemParams::reference()
    );
}
