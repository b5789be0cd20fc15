// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Mode dispatch, output files and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::plot::{emit_plot, PlotKind};
use super::{ExperimentConfig, Formats, Mode};
use crate::engine::{
    estimate_collapse_time, run_collapse, run_ensemble, winner_statistics, BornStatistics,
    CollapseConfig, EngineError, RunResult, TrajectoryPoint, MIN_RUNS,
};
use crate::exact::{
    build_le_hamiltonian, evolve_observed, le_occupation, local_probabilities,
    reconstruct_standard, BranchState,
};
use crate::fp::{
    boundary_current, compare_histogram, fp_step, stable_dt, CoefficientField, FPDensity,
    FieldSummary, Histogram, SimplexGrid,
};
use crate::wave::run_front;
use crate::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Success,
    Timeout,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub seed: Option<u64>,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub mode: Mode,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub status: RunStatus,
    /// Some requested output is missing or incomplete.
    pub partial: bool,
    pub error: Option<String>,
    pub runs: Vec<RunRecord>,
    pub wall_clock_s: f64,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    /// Copy with every wall-clock field zeroed, for replay comparisons.
    pub fn without_timing(&self) -> Self {
        let mut m = self.clone();
        m.wall_clock_s = 0.0;
        m.runs.iter_mut().for_each(|r| r.wall_clock_s = 0.0);
        m
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Outputs {
    dir: PathBuf,
    formats: Formats,
    files: Vec<OutputRecord>,
}

impl Outputs {
    fn new(dir: &Path, formats: Formats) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            formats,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.files.push(OutputRecord {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Builds the CSV text (returned for plotting) and writes it if CSV
    /// output is enabled.
    fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<String> {
        let text = csv_text(header, rows)?;
        if self.formats.csv {
            self.write(name, text.as_bytes())?;
        }
        Ok(text)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        if self.formats.json {
            let mut text =
                serde_json::to_string_pretty(value).map_err(|e| Error::Output(e.to_string()))?;
            text.push('\n');
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    fn svg(&mut self, name: &str, csv: &str, kind: PlotKind) -> Result<()> {
        if self.formats.svg {
            let svg = emit_plot(csv, kind).map_err(|e| Error::Output(format!("{name}: {e}")))?;
            self.write(name, svg.as_bytes())?;
        }
        Ok(())
    }
}

/// CSV with `header` and rows formatted by [`fmt_f64`].
pub fn csv_text(header: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| Error::Output(e.to_string()))?;
    for r in rows {
        w.write_record(r.iter().map(|&v| fmt_f64(v)))
            .map_err(|e| Error::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Output(e.to_string()))
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn header(fixed: &[&str], extra: Vec<String>) -> Vec<String> {
    fixed.iter().map(|s| s.to_string()).chain(extra).collect()
}

struct Job {
    outputs: Outputs,
    runs: Vec<RunRecord>,
    status: RunStatus,
    partial: bool,
}

/// Runs the configured mode, writes its outputs and finally the manifest.
///
/// The manifest is written even when the run fails; the error is then
/// returned after it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunManifest> {
    let mode = config.mode()?;
    let start = Instant::now();
    let mut job = Job {
        outputs: Outputs::new(&config.out, config.formats)?,
        runs: Vec::new(),
        status: RunStatus::Success,
        partial: false,
    };
    let result = match mode {
        Mode::Exact => exact_mode(config, &mut job),
        Mode::Wave => wave_mode(config, &mut job),
        Mode::Collapse => collapse_mode(config, &mut job, false),
        Mode::Sweep => collapse_mode(config, &mut job, true),
        Mode::Fp => fp_mode(config, &mut job).map(|_| ()),
        Mode::Compare => compare_mode(config, &mut job),
    };
    let error = result.as_ref().err();
    if let Some(e) = error {
        job.status = match e {
            Error::Engine(EngineError::Timeout(_)) => RunStatus::Timeout,
            _ => RunStatus::Error,
        };
        job.partial = true;
    }
    let mut outputs = job.outputs.files.clone();
    outputs.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = RunManifest {
        tool: "lecollapse".into(),
        version: crate::VERSION.into(),
        mode,
        config_hash: config.hash(),
        seeds: config.seed_list(),
        status: job.status,
        partial: job.partial,
        error: error.map(|e| e.to_string()),
        runs: job.runs,
        wall_clock_s: start.elapsed().as_secs_f64(),
        outputs,
    };
    let mut text =
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Output(e.to_string()))?;
    text.push('\n');
    let path = config.out.join(MANIFEST_NAME);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    result.map(|_| manifest)
}

/// Reads a manifest written by [`run_experiment`].
pub fn read_manifest(dir: impl AsRef<Path>) -> Result<RunManifest> {
    let path = dir.as_ref().join(MANIFEST_NAME);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Output(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ExactSummary {
    dim: usize,
    configurations: usize,
    words: usize,
    nonzeros: usize,
    hermitian_defect: f64,
    row_sum_norm: f64,
    dt: f64,
    steps: usize,
    final_time: f64,
    max_norm_drift: f64,
    final_le_occupation: Vec<f64>,
    max_cross_term: f64,
}

fn exact_mode(config: &ExperimentConfig, job: &mut Job) -> Result<()> {
    let s = &config.exact;
    let t0 = Instant::now();
    let h = build_le_hamiltonian(&s.model)?;
    let state = BranchState::localized(&h, &s.initial)?;
    let steps = (s.t_end * h.row_sum_norm / s.step_factor).ceil().max(1.0) as usize;
    let dt = s.t_end / steps as f64;
    let k = s.model.channels;
    let norm = |st: &BranchState| {
        reconstruct_standard(st)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let norm0 = norm(&state);
    let mut rows = Vec::new();
    let mut max_drift: f64 = 0.0;
    let mut max_cross: f64 = 0.0;
    let mut row = |step: usize, st: &BranchState| {
        let n = norm(st);
        max_drift = max_drift.max((n - norm0).abs());
        let mut r = vec![step as f64, st.time, n, h.hermitian_defect];
        r.extend((0..=k).map(|l| le_occupation(st, l)));
        match local_probabilities(st, &s.cell) {
            Ok(lp) => {
                max_cross = max_cross.max(lp.cross_term);
                r.push(lp.cross_term);
                r.extend(lp.f);
            }
            Err(_) => r.extend(std::iter::repeat_n(f64::NAN, k + 2)),
        }
        rows.push(r);
    };
    row(0, &state);
    let every = s.record_every;
    let fin = evolve_observed(&state, &h, dt, steps, |step, st| {
        if step % every == 0 || step == steps {
            row(step, st);
        }
    })?;
    job.runs.push(RunRecord {
        label: "exact".into(),
        seed: None,
        wall_clock_s: t0.elapsed().as_secs_f64(),
    });
    let hdr = header(
        &["step", "time", "norm", "hermitian_defect"],
        (0..=k)
            .map(|l| format!("le_occupation_{l}"))
            .chain(std::iter::once("cross_term".to_string()))
            .chain((0..=k).map(|l| format!("f_{l}")))
            .collect(),
    );
    job.outputs.csv("exact.csv", &hdr, &rows)?;
    let summary = ExactSummary {
        dim: h.basis.dim(),
        configurations: h.basis.n_configs(),
        words: h.basis.n_words,
        nonzeros: h.matrix.nnz(),
        hermitian_defect: h.hermitian_defect,
        row_sum_norm: h.row_sum_norm,
        dt,
        steps,
        final_time: fin.time,
        max_norm_drift: max_drift,
        final_le_occupation: (0..=k).map(|l| le_occupation(&fin, l)).collect(),
        max_cross_term: max_cross,
    };
    job.outputs.json("exact_summary.json", &summary)
}

#[derive(Serialize)]
struct SpeedSummary {
    speed: Option<f64>,
    residual: Option<f64>,
    v_kpp: f64,
    v_sound: f64,
    ratio_to_kpp: Option<f64>,
    ratio_to_sound: Option<f64>,
    final_position: f64,
    final_width: f64,
    samples: usize,
    error: Option<String>,
}

fn wave_mode(config: &ExperimentConfig, job: &mut Job) -> Result<()> {
    let s = &config.wave;
    let k = &config.kinetic;
    let t0 = Instant::now();
    let run = run_front(&s.grid, k, &s.seed, s.dt, s.steps(), s.record_every)?;
    job.runs.push(RunRecord {
        label: "wave".into(),
        seed: None,
        wall_clock_s: t0.elapsed().as_secs_f64(),
    });
    let rows: Vec<Vec<f64>> = run
        .history
        .iter()
        .enumerate()
        .map(|(i, smp)| {
            let local = if i == 0 {
                f64::NAN
            } else {
                let prev = &run.history[i - 1];
                (smp.position - prev.position) / (smp.time - prev.time)
            };
            vec![smp.time, smp.position, smp.width, local]
        })
        .collect();
    let csv = job.outputs.csv(
        "front_trajectory.csv",
        &header(&["time", "position", "width", "speed_estimate"], vec![]),
        &rows,
    )?;
    job.outputs
        .svg("front_trajectory.svg", &csv, PlotKind::FrontTrajectory)?;

    let stride = s.grid.stride(0);
    let n0 = s.grid.cells[0];
    let profile: Vec<Vec<f64>> = (0..n0)
        .map(|i| vec![s.grid.center(i), run.field[i * stride]])
        .collect();
    let csv = job
        .outputs
        .csv("field_profile.csv", &header(&["x", "f"], vec![]), &profile)?;
    job.outputs
        .svg("field_profile.svg", &csv, PlotKind::FieldProfile)?;

    let last = run.history.last().expect("initial sample is recorded");
    let (speed, residual, error) = match &run.speed {
        Ok(sp) => (Some(sp.speed), Some(sp.residual), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let summary = SpeedSummary {
        speed,
        residual,
        v_kpp: k.kpp_speed(),
        v_sound: k.sound_speed(),
        ratio_to_kpp: speed.map(|v| v / k.kpp_speed()),
        ratio_to_sound: speed.map(|v| v / k.sound_speed()),
        final_position: last.position,
        final_width: last.width,
        samples: run.history.len(),
        error,
    };
    job.outputs.json("speed_summary.json", &summary)?;
    run.speed.map(|_| ()).map_err(Error::from)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    seed: u64,
    stream: u64,
    absorbed: bool,
    winner: Option<usize>,
    collapse_time: Option<f64>,
    steps: usize,
    slip_count: u64,
    initial: &'a [f64],
    final_p: Vec<f64>,
    max_slip_mean: Option<f64>,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    seeds: Vec<u64>,
    absorbed: usize,
    timeouts: usize,
    min_runs: usize,
    min_runs_met: bool,
    statistics: Option<&'a BornStatistics>,
    mean_collapse_time: Option<f64>,
}

#[derive(Serialize)]
struct TimescaleReport {
    tau_c: f64,
    l_system: f64,
    delta: Option<f64>,
    tau: f64,
    n_a: f64,
    lambda: f64,
    w: f64,
}

fn trajectory_rows(t: &[TrajectoryPoint]) -> Vec<Vec<f64>> {
    t.iter()
        .map(|pt| {
            std::iter::once(pt.time)
                .chain(pt.p.iter().copied())
                .collect()
        })
        .collect()
}

fn collapse_mode(config: &ExperimentConfig, job: &mut Job, sweep: bool) -> Result<()> {
    if sweep && config.seeds.is_none() {
        return Err(super::ConfigError::Invalid {
            key: "seeds".into(),
            line: None,
            constraint: "is required in sweep mode".into(),
        }
        .into());
    }
    let mut cc: CollapseConfig = config.collapse.clone();
    cc.record_trajectory = config.trajectory;
    let seeds = config.seed_list();
    let results: Vec<(u64, f64, std::result::Result<RunResult, EngineError>)> = seeds
        .par_iter()
        .map(|&seed| {
            let t0 = Instant::now();
            let r = run_collapse(&cc, seed);
            (seed, t0.elapsed().as_secs_f64(), r)
        })
        .collect();
    let k = cc.p0.len();
    let mut done = Vec::new();
    let mut timeouts = 0;
    let mut first_error = None;
    let mut first_timeout = None;
    for (seed, wall, r) in results {
        job.runs.push(RunRecord {
            label: format!("collapse-{seed}"),
            seed: Some(seed),
            wall_clock_s: wall,
        });
        let (summary, trajectory) = match &r {
            Ok(res) => (
                RunSummary {
                    seed,
                    stream: res.stream,
                    absorbed: true,
                    winner: Some(res.winner),
                    collapse_time: Some(res.collapse_time),
                    steps: res.steps,
                    slip_count: res.slip_count,
                    initial: cc.p0.as_slice(),
                    final_p: (0..k)
                        .map(|j| if j == res.winner { 1.0 } else { 0.0 })
                        .collect(),
                    max_slip_mean: Some(res.max_mean),
                },
                res.trajectory.as_deref(),
            ),
            Err(e @ EngineError::Timeout(part)) => {
                timeouts += 1;
                first_timeout.get_or_insert_with(|| e.clone());
                (
                    RunSummary {
                        seed,
                        stream: part.stream,
                        absorbed: false,
                        winner: None,
                        collapse_time: None,
                        steps: part.steps,
                        slip_count: part.slip_count,
                        initial: cc.p0.as_slice(),
                        final_p: part.p.clone(),
                        max_slip_mean: None,
                    },
                    part.trajectory.as_deref(),
                )
            }
            Err(e) => {
                first_error.get_or_insert_with(|| e.clone());
                continue;
            }
        };
        job.outputs.json(&format!("run_{seed}.json"), &summary)?;
        if let Some(t) = trajectory {
            let csv = job.outputs.csv(
                &format!("trajectory_{seed}.csv"),
                &header(&["time"], names("p_", k)),
                &trajectory_rows(t),
            )?;
            job.outputs.svg(
                &format!("p_trajectory_{seed}.svg"),
                &csv,
                PlotKind::PTrajectory,
            )?;
        }
        if let Ok(res) = r {
            done.push(res);
        }
    }
    let ts = &config.timescale;
    job.outputs.json(
        "timescale.json",
        &TimescaleReport {
            tau_c: estimate_collapse_time(&cc.slip, ts.l_system, ts.delta)?,
            l_system: ts.l_system,
            delta: ts.delta,
            tau: cc.slip.tau,
            n_a: cc.slip.n_a,
            lambda: cc.slip.lambda,
            w: cc.slip.w,
        },
    )?;
    if sweep {
        let stats = if done.is_empty() {
            None
        } else {
            Some(winner_statistics(&done, &cc.p0)?)
        };
        let summary = SweepSummary {
            seeds: seeds.clone(),
            absorbed: done.len(),
            timeouts,
            min_runs: MIN_RUNS,
            min_runs_met: done.len() >= MIN_RUNS,
            statistics: stats.as_ref(),
            mean_collapse_time: (!done.is_empty())
                .then(|| done.iter().map(|r| r.collapse_time).sum::<f64>() / done.len() as f64),
        };
        job.outputs.json("born.json", &summary)?;
    }
    if let Some(e) = first_error {
        return Err(e.into());
    }
    match first_timeout {
        Some(t) => Err(t.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct FpSummary {
    channels: usize,
    resolution: usize,
    cells: usize,
    dt: f64,
    stable_dt: f64,
    steps: usize,
    final_time: f64,
    initial_mass: f64,
    final_mass: f64,
    retained_fraction: f64,
    field_integrals: Vec<f64>,
}

struct FpRun {
    grid: SimplexGrid,
    dt: f64,
    snapshots: Vec<(usize, FPDensity)>,
}

fn fp_setup(
    config: &ExperimentConfig,
) -> Result<(SimplexGrid, CoefficientField, FPDensity, f64, FieldSummary)> {
    let k = config.collapse.p0.len();
    let grid = SimplexGrid::new(k, config.fp.resolution)?;
    let fields = config.collapse.initial_fields()?;
    let summary = FieldSummary::from_fields(&fields, &config.collapse.slip);
    let coeffs = CoefficientField::new(&grid, summary.clone());
    let density = FPDensity::gaussian(&grid, config.collapse.p0.as_slice(), config.fp.sigma)?;
    let dt = config.fp.dt_factor * stable_dt(&grid, &coeffs);
    Ok((grid, coeffs, density, dt, summary))
}

fn fp_mode(config: &ExperimentConfig, job: &mut Job) -> Result<FpRun> {
    fp_run(config, job, config.fp.steps, &[])
}

fn fp_run(
    config: &ExperimentConfig,
    job: &mut Job,
    steps: usize,
    snapshot_at: &[usize],
) -> Result<FpRun> {
    let t0 = Instant::now();
    let (grid, coeffs, mut density, dt, summary) = fp_setup(config)?;
    let k = grid.channels;
    let mass0 = density.mass(&grid);
    let mut series = Vec::new();
    let mut currents = Vec::new();
    let mut snapshots = Vec::new();
    let mut record = |step: usize, d: &FPDensity| {
        let mass = d.mass(&grid);
        let mut r = vec![step as f64, d.time, mass, mass / mass0];
        r.extend((0..k).map(|a| d.first_moment(&grid, a)));
        r.push(d.variance(&grid, 0));
        series.push(r);
        let bc = boundary_current(d, &grid, &coeffs);
        let total: f64 = bc.iter().map(|b| b.outward).sum();
        let peak = bc.iter().map(|b| b.outward).fold(0.0, f64::max);
        currents.push(vec![step as f64, d.time, total, peak]);
    };
    record(0, &density);
    if snapshot_at.contains(&0) {
        snapshots.push((0, density.clone()));
    }
    for step in 1..=steps {
        density = fp_step(&density, &grid, &coeffs, dt)?;
        if step % config.fp.record_every == 0 || step == steps {
            record(step, &density);
        }
        if snapshot_at.contains(&step) {
            snapshots.push((step, density.clone()));
        }
    }
    job.runs.push(RunRecord {
        label: "fp".into(),
        seed: None,
        wall_clock_s: t0.elapsed().as_secs_f64(),
    });
    let hdr = header(
        &["step", "time", "mass", "retained"],
        names("mean_p_", k)
            .into_iter()
            .chain(["var_p_1".to_string()])
            .collect(),
    );
    job.outputs.csv("fp_series.csv", &hdr, &series)?;
    job.outputs.csv(
        "boundary_current.csv",
        &header(&["step", "time", "outward_total", "outward_peak"], vec![]),
        &currents,
    )?;
    let cells: Vec<Vec<f64>> = (0..grid.len())
        .map(|c| grid.center(c).into_iter().chain([density.phi[c]]).collect())
        .collect();
    job.outputs.csv(
        "density.csv",
        &header(
            &[],
            names("p_", k)
                .into_iter()
                .chain(["phi".to_string()])
                .collect(),
        ),
        &cells,
    )?;
    let final_mass = density.mass(&grid);
    job.outputs.json(
        "fp_summary.json",
        &FpSummary {
            channels: k,
            resolution: grid.resolution,
            cells: grid.len(),
            dt,
            stable_dt: stable_dt(&grid, &coeffs),
            steps,
            final_time: density.time,
            initial_mass: mass0,
            final_mass,
            retained_fraction: final_mass / mass0,
            field_integrals: summary.integrals,
        },
    )?;
    Ok(FpRun {
        grid,
        dt,
        snapshots,
    })
}

#[derive(Serialize)]
struct CheckpointReport {
    fp_step: usize,
    time: f64,
    engine_step: usize,
    tv_distance: f64,
    mc_absorbed_fraction: f64,
    fp_lost_fraction: f64,
    fp_retained_fraction: f64,
}

#[derive(Serialize)]
struct CompareReport {
    runs: usize,
    seed: u64,
    engine_dt: f64,
    fp_dt: f64,
    bins: usize,
    checkpoints: Vec<CheckpointReport>,
}

fn compare_mode(config: &ExperimentConfig, job: &mut Job) -> Result<()> {
    let mut checkpoints = config.compare.checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let last = checkpoints.last().copied().unwrap_or(0);
    let fp = fp_run(config, job, last, &checkpoints)?;

    let mut cc = config.collapse.clone();
    cc.static_fields = true;
    cc.record_trajectory = true;
    let engine_step = |n: usize| (n as f64 * fp.dt / cc.dt).round() as usize;
    cc.max_steps = engine_step(last) + 1;
    let t0 = Instant::now();
    let ensemble = run_ensemble(&cc, config.seed, config.compare.runs);
    job.runs.push(RunRecord {
        label: "ensemble".into(),
        seed: Some(config.seed),
        wall_clock_s: t0.elapsed().as_secs_f64(),
    });
    let mut paths: Vec<Vec<TrajectoryPoint>> = Vec::with_capacity(ensemble.len());
    for r in ensemble {
        match r {
            Ok(res) => paths.push(res.trajectory.expect("trajectory recorded")),
            Err(EngineError::Timeout(part)) => {
                paths.push(part.trajectory.expect("trajectory recorded"))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let coarse = SimplexGrid::new(fp.grid.channels, config.compare.bins)?;
    let mut reports = Vec::new();
    for (n, density) in &fp.snapshots {
        let es = engine_step(*n);
        let points: Vec<&[f64]> = paths
            .iter()
            .map(|t| t[es.min(t.len() - 1)].p.as_slice())
            .collect();
        let hist = Histogram::from_points(&coarse, points.iter().copied());
        let cmp = compare_histogram(density, &fp.grid, &hist)?;
        if fp.grid.channels == 2 {
            let ratio = fp.grid.resolution / coarse.resolution;
            let mut fp_bins = vec![0.0; coarse.len()];
            for (c, &v) in density.phi.iter().enumerate() {
                fp_bins[(fp.grid.cells[c][0] / ratio).min(coarse.len() - 1)] +=
                    v * fp.grid.cell_measure();
            }
            let total = hist.total.max(1) as f64;
            let rows: Vec<Vec<f64>> = (0..coarse.len())
                .map(|b| {
                    vec![
                        coarse.center(b)[0],
                        hist.counts[b] as f64 / total,
                        fp_bins[b],
                    ]
                })
                .collect();
            let csv = job.outputs.csv(
                &format!("hist_vs_density_{n}.csv"),
                &header(&["x", "mc", "fp"], vec![]),
                &rows,
            )?;
            job.outputs.svg(
                &format!("hist_vs_density_{n}.svg"),
                &csv,
                PlotKind::HistogramVsDensity,
            )?;
        }
        reports.push(CheckpointReport {
            fp_step: *n,
            time: density.time,
            engine_step: es,
            tv_distance: cmp.tv_distance,
            mc_absorbed_fraction: cmp.mc_boundary_fraction,
            fp_lost_fraction: cmp.fp_boundary_fraction,
            fp_retained_fraction: 1.0 - cmp.fp_boundary_fraction,
        });
    }
    job.outputs.json(
        "compare.json",
        &CompareReport {
            runs: config.compare.runs,
            seed: config.seed,
            engine_dt: cc.dt,
            fp_dt: fp.dt,
            bins: config.compare.bins,
            checkpoints: reports,
        },
    )
}
