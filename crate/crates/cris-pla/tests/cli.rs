//! End-to-end checks of the command-line interface: exit codes, file
//! contracts, and determinism of emitted CSV bodies.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cris_pla::pla::{det_curve, SampleMetadata, ScoreSamples};
use cris_pla::report::{det_csv, read_scores_csv};
use cris_pla::StrategyKind;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cris-pla"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = binary().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_expect_code(args: &[&str], code: i32) -> Output {
    let out = binary().args(args).output().expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(code),
        "expected exit {code} for {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const SMALL_CONFIG: &str = r#"
schema_version = 1

[cris]
rows = 4
cols = 4
strategy = "dynamic-random"

[attack]
kind = "passive"
positions = [[3.4, 2.5, 3.0]]

[sim]
trials = 10
seed = 7
n_thresholds = 32
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_emits_contracted_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out_dir = dir.path().join("out");
    run_ok(&["run", "--config", &config, "--out", out_dir.to_str().unwrap()]);

    let entries: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let scores_file = entries.iter().find(|n| n.starts_with("scores_")).expect("scores csv");
    let det_file = entries.iter().find(|n| n.starts_with("det_")).expect("det csv");
    assert!(entries.iter().any(|n| n == "summary.csv"));

    let scores_text = fs::read_to_string(out_dir.join(scores_file)).unwrap();
    let mut lines = scores_text.lines();
    assert_eq!(lines.next().unwrap(), "trial,hypothesis,score");
    // 10 trials per hypothesis -> exactly 20 data rows.
    assert_eq!(lines.count(), 20);

    let det_text = fs::read_to_string(out_dir.join(det_file)).unwrap();
    assert!(det_text.starts_with("gamma,pfa,pmd\n"));

    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("plan_id,scenario,n_elements,attacker,eer,runtime_s\n"));
    assert_eq!(summary.lines().count(), 2, "one plan, one data row");
    assert!(summary.contains("dynamic-random"));
}

#[test]
fn emitted_det_matches_recomputation_from_scores() {
    // Round trip: re-reading the scores file and recomputing the curve
    // reproduces the emitted det file byte for byte.
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out_dir = dir.path().join("out");
    run_ok(&["run", "--config", &config, "--out", out_dir.to_str().unwrap()]);

    let entries: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let scores_file = entries.iter().find(|n| n.starts_with("scores_")).unwrap();
    let det_file = entries.iter().find(|n| n.starts_with("det_")).unwrap();

    let (h0, h1) = read_scores_csv(&fs::read_to_string(out_dir.join(scores_file)).unwrap()).unwrap();
    let samples = ScoreSamples {
        h0_scores: h0,
        h1_scores: h1,
        metadata: SampleMetadata {
            strategy: StrategyKind::DynamicRandom,
            n_elements: 16,
            attacker: String::new(),
            seed: 7,
        },
    };
    let recomputed = det_csv(&det_curve(&samples, 32).unwrap());
    assert_eq!(recomputed, fs::read_to_string(out_dir.join(det_file)).unwrap());
}

#[test]
fn same_seed_and_config_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run_ok(&["run", "--config", &config, "--out", out_a.to_str().unwrap(), "--seed", "99"]);
    run_ok(&["run", "--config", &config, "--out", out_b.to_str().unwrap(), "--seed", "99"]);
    let mut compared = 0;
    for entry in fs::read_dir(&out_a).unwrap() {
        let name = entry.unwrap().file_name();
        if name == "summary.csv" {
            continue; // runtime_s is wall time
        }
        assert_eq!(
            fs::read(out_a.join(&name)).unwrap(),
            fs::read(out_b.join(&name)).unwrap(),
            "{name:?} differs between identical runs"
        );
        compared += 1;
    }
    assert_eq!(compared, 2);

    // A different seed changes the score bodies.
    let out_c = dir.path().join("c");
    run_ok(&["run", "--config", &config, "--out", out_c.to_str().unwrap(), "--seed", "100"]);
    let scores_name = |d: &Path| {
        fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .find(|n| n.starts_with("scores_"))
            .unwrap()
    };
    // Seed participates in the plan id, so the file names differ too.
    assert_ne!(scores_name(&out_a), scores_name(&out_c));
}

#[test]
fn missing_config_exits_2_without_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    run_expect_code(
        &["run", "--config", dir.path().join("nope.toml").to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        2,
    );
    assert!(!out_dir.exists(), "no partial outputs on config error");
}

#[test]
fn validate_accepts_defaults_and_prints_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "schema_version = 1\n");
    let out = run_ok(&["validate", "--config", &config]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("[cris]"));
    assert!(stdout.contains("rows = 50"));
    assert!(stdout.contains("trials = 20000"));
}

#[test]
fn validate_rejects_oversized_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "schema_version = 1\n");
    let out = run_expect_code(
        &["validate", "--config", &config, "--set", "cris.rows=60", "--set", "cris.cols=40"],
        2,
    );
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("outside"), "stderr: {stderr}");
}

#[test]
fn validate_rejects_zero_trials() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "schema_version = 1\n");
    run_expect_code(&["validate", "--config", &config, "--set", "sim.trials=0"], 2);
}

#[test]
fn validate_reports_all_violations_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "schema_version = 1\n");
    let out = run_expect_code(
        &[
            "validate",
            "--config",
            &config,
            "--set",
            "sim.trials=0",
            "--set",
            "sim.n_thresholds=1",
        ],
        2,
    );
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("sim.trials"), "stderr: {stderr}");
    assert!(stderr.contains("sim.n_thresholds"), "stderr: {stderr}");
}

#[test]
fn reproduce_rejects_zero_trials_override() {
    let dir = tempfile::tempdir().unwrap();
    run_expect_code(
        &[
            "reproduce",
            "fig6",
            "--scale",
            "desk",
            "--set",
            "sim.trials=0",
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ],
        2,
    );
}

#[test]
fn reproduce_unknown_figure_exits_2() {
    run_expect_code(&["reproduce", "fig9"], 2);
}

#[test]
fn runtime_failure_exits_3() {
    // An underdetermined predictor fit passes static validation but fails
    // when the association phase runs.
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
schema_version = 1

[cris]
rows = 4
cols = 4

[attack]
positions = [[3.4, 2.5, 3.0]]

[sim]
trials = 5
reference = "estimated"
probe_configs = 3
"#,
    );
    let out = run_expect_code(
        &["run", "--config", &config, "--out", dir.path().join("out").to_str().unwrap()],
        3,
    );
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("underdetermined"), "stderr: {stderr}");
}

#[test]
fn threads_env_var_is_a_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out_env = dir.path().join("env");
    let out_flag = dir.path().join("flag");

    let status = binary()
        .args(["run", "--config", &config, "--out", out_env.to_str().unwrap()])
        .env("CRIS_SIM_THREADS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    run_ok(&["run", "--config", &config, "--out", out_flag.to_str().unwrap(), "--threads", "3"]);

    for entry in fs::read_dir(&out_env).unwrap() {
        let name = entry.unwrap().file_name();
        if name == "summary.csv" {
            continue;
        }
        assert_eq!(
            fs::read(out_env.join(&name)).unwrap(),
            fs::read(out_flag.join(&name)).unwrap(),
            "{name:?} differs between worker counts"
        );
    }

    let bad = binary()
        .args(["run", "--config", &config, "--out", dir.path().join("bad").to_str().unwrap()])
        .env("CRIS_SIM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reproduce_emits_twelve_curves_and_index() {
    // Tiny trial override keeps this fast; the grid is 2 sizes x 6 attackers.
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    run_ok(&[
        "reproduce",
        "fig6",
        "--scale",
        "desk",
        "--set",
        "sim.trials=25",
        "--seed",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let entries: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let curves: Vec<&String> = entries.iter().filter(|n| n.starts_with("det_fig6_")).collect();
    assert_eq!(curves.len(), 12, "entries: {entries:?}");
    assert!(entries.iter().any(|n| n == "fig6_index.gp"));
    assert!(entries.iter().all(|n| n != "summary.csv"));
    let index = fs::read_to_string(out_dir.join("fig6_index.gp")).unwrap();
    for curve in curves {
        assert!(index.contains(curve.as_str()), "index missing {curve}");
    }
}
