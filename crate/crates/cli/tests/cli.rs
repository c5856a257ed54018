use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use mirrorlang::{main_with_args, EXIT_OK, EXIT_STRICT, EXIT_USAGE};
use serde_json::Value;

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["mirrorlang"];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

/// All files under `dir` except timing sidecars, keyed by relative name.
fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| !e.file_name().to_string_lossy().ends_with(".timing.json"))
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]), EXIT_OK);
    assert_eq!(run(&["--version"]), EXIT_OK);
    assert_eq!(run(&["heating", "--help"]), EXIT_OK);
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(run(&["decay", "--no-such-flag"]), EXIT_USAGE);
    assert_eq!(
        run(&["heating", "--threads", "2", "--sequential", "--seed", "1"]),
        EXIT_USAGE
    );
    assert_eq!(
        run(&["heating", "--threads", "0", "--seed", "1"]),
        EXIT_USAGE
    );
    assert_eq!(run(&["fdt-check", "--regime", "lukewarm"]), EXIT_USAGE);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.cfg", "epsilon = 1e-3\nwarp_factor = 9\n"),
        ("conflict.cfg", "epsilon = 1e-3\nm_kg = 1\n"),
        ("syntax.cfg", "epsilon 1e-3\n"),
        ("noseed.cfg", "epsilon = 1e-3\nn_paths = 10\n"),
        ("badvalue.cfg", "epsilon = -1\n"),
    ];
    for (name, text) in cases {
        let cfg = dir.path().join(name);
        fs::write(&cfg, text).unwrap();
        let out = dir.path().join(format!("{name}.out"));
        assert_eq!(
            run(&["decay", "--config", path_str(&cfg), "--out", path_str(&out)]),
            EXIT_USAGE,
            "{name}"
        );
        assert!(!out.exists(), "{name} wrote output");
    }
    let missing = dir.path().join("absent.cfg");
    assert_eq!(run(&["decay", "--config", path_str(&missing)]), EXIT_USAGE);
}

#[test]
fn stochastic_scenarios_require_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["noise", "heating", "thermal"] {
        let out = dir.path().join(scenario);
        assert_eq!(
            run(&[scenario, "--n-paths", "4", "--out", path_str(&out)]),
            EXIT_USAGE,
            "{scenario}"
        );
    }
}

#[test]
fn vacuum_fdt_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fdt.json");
    assert_eq!(
        run(&[
            "fdt-check",
            "--regime",
            "vacuum",
            "--out",
            path_str(&out),
            "--strict"
        ]),
        EXIT_OK
    );
    let s = read_json(&out);
    assert_eq!(s["pass"], Value::Bool(true));
    assert_eq!(s["scenario"], "fdt-check");
    assert!(dir.path().join("fdt.timing.json").exists());
}

#[test]
fn csv_header_carries_the_summary_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay");
    assert_eq!(
        run(&["decay", "--t-max", "200", "--out", path_str(&out)]),
        EXIT_OK
    );
    let s = read_json(&out.join("summary.json"));
    let hash = s["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert_eq!(
        first,
        format!(
            "# mirrorlang {} config_hash={hash}",
            env!("CARGO_PKG_VERSION")
        )
    );
    let timing = read_json(&out.join("summary.timing.json"));
    assert_eq!(timing["config_hash"].as_str().unwrap(), hash);
    assert!(timing["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn hash_follows_semantic_settings_only() {
    let dir = tempfile::tempdir().unwrap();
    let hash_of = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["decay", "--t-max", "200", "--out", path_str(&out)];
        args.extend_from_slice(extra);
        assert_eq!(run(&args), EXIT_OK);
        read_json(&out.join("summary.json"))["config_hash"]
            .as_str()
            .unwrap()
            .to_string()
    };
    let base = hash_of("a", &[]);
    assert_eq!(hash_of("b", &["--sequential"]), base);
    assert_eq!(hash_of("c", &["--threads", "2"]), base);
    assert_ne!(hash_of("d", &["--dt", "0.04"]), base);
    assert_ne!(hash_of("e", &["--dt", "0.045"]), base);

    let tol = dir.path().join("tol.txt");
    fs::write(&tol, "decay_rel = 0.02\n").unwrap();
    assert_ne!(hash_of("f", &["--tol-file", path_str(&tol)]), base);
}

#[test]
fn config_file_and_flags_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# heating run\nepsilon = 1e-3\ntheta_t = 0.2\nlambda_ratio = 5\nt_max = 40\ndt = 0.05\nn_paths = 16\nseed = 9\n").unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(
        run(&["heating", "--config", path_str(&cfg), "--out", path_str(&a)]),
        EXIT_OK
    );
    assert_eq!(
        run(&[
            "heating",
            "--t-max",
            "40",
            "--dt",
            "0.05",
            "--n-paths",
            "16",
            "--seed",
            "9",
            "--out",
            path_str(&b)
        ]),
        EXIT_OK
    );
    assert_eq!(artifacts(&a), artifacts(&b));
}

#[test]
fn artifacts_are_identical_across_thread_settings() {
    let dir = tempfile::tempdir().unwrap();
    let settings: [&[&str]; 4] = [
        &[],
        &["--threads", "1"],
        &["--threads", "3"],
        &["--sequential"],
    ];
    let mut outputs = Vec::new();
    for (i, extra) in settings.iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let mut args = vec![
            "heating",
            "--seed",
            "2024",
            "--n-paths",
            "24",
            "--t-max",
            "30",
            "--out",
            path_str(&out),
        ];
        args.extend_from_slice(extra);
        assert_eq!(run(&args), EXIT_OK);
        outputs.push(artifacts(&out));
    }
    assert!(outputs[0].contains_key("ensemble.csv"));
    for o in &outputs[1..] {
        assert_eq!(o, &outputs[0]);
    }
}

#[test]
fn rerun_overwrites_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("noise");
    let args = [
        "noise",
        "--spec",
        "thermal-ou",
        "--seed",
        "5",
        "--n-paths",
        "8",
        "--t-max",
        "10",
        "--out",
        path_str(&out),
    ];
    assert_eq!(run(&args), EXIT_OK);
    let first = artifacts(&out);
    assert!(first.contains_key("autocov.csv"));
    assert!(first.contains_key("path_00007.csv"));
    assert_eq!(run(&args), EXIT_OK);
    assert_eq!(artifacts(&out), first);
}

#[test]
fn strict_report_signals_failed_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    assert_eq!(run(&["report", "--out", path_str(&out)]), EXIT_OK);
    assert_eq!(
        run(&["report", "--strict", "--out", path_str(&out)]),
        EXIT_STRICT
    );
    let s = read_json(&out);
    assert_eq!(s["pass"], Value::Bool(false));
    let names: Vec<&str> = s["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"quanta_per_cycle"));
}

#[test]
fn kernels_grid_has_requested_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    assert_eq!(
        run(&[
            "kernels",
            "--domain",
            "freq",
            "--kind",
            "chi",
            "--regime",
            "thermal",
            "--grid",
            "0.5:4:8",
            "--out",
            path_str(&out)
        ]),
        EXIT_OK
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "grid_value,re,im");
    assert_eq!(lines.len(), 2 + 8);
    assert!(lines[2].starts_with("0.5,"));
    assert!(lines[9].starts_with("4.0,"));
    assert_eq!(
        run(&["kernels", "--grid", "1:2", "--out", path_str(&out)]),
        EXIT_USAGE
    );
}
