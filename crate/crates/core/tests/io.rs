// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::Command;

use lecollapse::engine::{winner_statistics, ChannelProbabilities, RunResult};
use lecollapse::io::{
    csv_text, fmt_f64, load_config, read_manifest, run_experiment, ConfigError, ExperimentConfig,
    Mode, RunStatus,
};
use proptest::prelude::*;

fn config(text: &str, mode: Mode, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::parse(text).unwrap();
    c.mode = Some(mode);
    c.out = out.to_path_buf();
    c
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn load_reports_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "mode = wave\n\n# fine so far\nwave.dt = 7\n").unwrap();
    match load_config(&path) {
        Err(ConfigError::Invalid { key, line, .. }) => {
            assert_eq!(key, "wave.dt");
            assert_eq!(line, Some(4));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        load_config(dir.path().join("missing.conf")),
        Err(ConfigError::Io { .. })
    ));
}

#[test]
fn shipped_configs_load() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(root).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "conf") {
            let c = load_config(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            assert!(c.mode.is_some());
            n += 1;
        }
    }
    assert!(n >= 5);
}

#[test]
fn wave_default_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_experiment(&config(
        "wave.extent = 100\nwave.t_end = 60\n",
        Mode::Wave,
        dir.path(),
    ))
    .unwrap();
    assert_eq!(m.status, RunStatus::Success);
    let names: Vec<&str> = m.outputs.iter().map(|o| o.path.as_str()).collect();
    for f in [
        "front_trajectory.csv",
        "speed_summary.json",
        "front_trajectory.svg",
        "field_profile.csv",
    ] {
        assert!(names.contains(&f), "{f} missing from {names:?}");
    }
    let s = json(&dir.path().join("speed_summary.json"));
    assert!(s["speed"].as_f64().unwrap() > 0.7);
    let head = std::fs::read_to_string(dir.path().join("front_trajectory.csv")).unwrap();
    assert!(head.starts_with("time,position,width,speed_estimate\n"));
}

#[test]
fn sweep_aggregate_matches_run_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_experiment(&config("seeds = 0..10\n", Mode::Sweep, dir.path())).unwrap();
    assert_eq!(m.seeds, (0..10).collect::<Vec<_>>());
    let mut results = Vec::new();
    for s in 0..10 {
        let r = json(&dir.path().join(format!("run_{s}.json")));
        assert_eq!(r["seed"], s);
        results.push(RunResult {
            winner: r["winner"].as_u64().unwrap() as usize,
            collapse_time: r["collapse_time"].as_f64().unwrap(),
            steps: r["steps"].as_u64().unwrap() as usize,
            slip_count: r["slip_count"].as_u64().unwrap(),
            seed: s,
            stream: 0,
            initial: vec![0.3, 0.7],
            max_mean: r["max_slip_mean"].as_f64().unwrap(),
            trajectory: None,
        });
    }
    let p0 = ChannelProbabilities::new(vec![0.3, 0.7]).unwrap();
    let recomputed = serde_json::to_value(winner_statistics(&results, &p0).unwrap()).unwrap();
    let born = json(&dir.path().join("born.json"));
    assert_eq!(born["statistics"], recomputed);
    assert_eq!(born["min_runs_met"], false);
}

#[test]
fn replay_gives_identical_manifest() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let text = "seed = 5\ntrajectory = true\n";
    let ma = run_experiment(&config(text, Mode::Collapse, a.path())).unwrap();
    let mb = run_experiment(&config(text, Mode::Collapse, b.path())).unwrap();
    assert_eq!(ma.without_timing(), mb.without_timing());
    assert_eq!(read_manifest(a.path()).unwrap(), ma);
    for o in &ma.outputs {
        assert_eq!(
            std::fs::read(a.path().join(&o.path)).unwrap(),
            std::fs::read(b.path().join(&o.path)).unwrap()
        );
    }
}

#[test]
fn formats_select_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_experiment(&config(
        "formats = json\nexact.t_end = 1\n",
        Mode::Exact,
        dir.path(),
    ))
    .unwrap();
    assert!(m.outputs.iter().all(|o| o.path.ends_with(".json")));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn timeout_is_flagged_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_experiment(&config(
        "collapse.max_steps = 2\n",
        Mode::Collapse,
        dir.path(),
    ))
    .unwrap_err();
    assert_eq!(err.exit_code(), 4);
    let m = read_manifest(dir.path()).unwrap();
    assert_eq!(m.status, RunStatus::Timeout);
    assert!(m.partial);
    assert_eq!(json(&dir.path().join("run_0.json"))["absorbed"], false);
}

#[test]
fn sweep_requires_a_range() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_experiment(&config("", Mode::Sweep, dir.path())).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lecollapse"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = |s: &str| dir.path().join(s).to_string_lossy().into_owned();
    let conf = d("c.conf");
    std::fs::write(&conf, "d_coeff = 1\n").unwrap();
    let (code, err) = cli(&["wave", "--config", &conf, "--out", &d("a")]);
    assert_eq!(code, 2);
    assert!(err.contains("D = λ²/6τ"), "{err}");
    let (code, _) = cli(&["collapse", "--max-steps", "2", "--out", &d("b")]);
    assert_eq!(code, 4);
    std::fs::write(&conf, "wave.extent = 20\nwave.t_end = 5\n").unwrap();
    let (code, _) = cli(&["wave", "--config", &conf, "--out", &d("c")]);
    assert_eq!(code, 3);
    let (code, _) = cli(&[
        "sweep",
        "--seeds",
        "0..3",
        "--formats",
        "json",
        "--trajectory",
        "--out",
        &d("e"),
    ]);
    assert_eq!(code, 0);
    assert!(Path::new(&d("e")).join("born.json").exists());
    let (code, _) = cli(&["collapse", "--seeds", "3..3"]);
    assert_eq!(code, 2);
}

proptest! {
    #[test]
    fn csv_round_trips(rows in proptest::collection::vec(proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3), 0..20)) {
        let header = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let text = csv_text(&header, &rows).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let back: Vec<Vec<f64>> = rdr
            .records()
            .map(|r| r.unwrap().iter().map(|v| v.parse::<f64>().unwrap()).collect())
            .collect();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn float_text_round_trips(v in any::<f64>()) {
        let s = fmt_f64(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!(back == v || (v.is_nan() && back.is_nan()));
    }
}
