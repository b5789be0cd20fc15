// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one line per criterion.
//!
//! Exits 0 after printing every verdict so the rest of the workspace tests
//! still run; set `ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

use std::path::{Path, PathBuf};
use std::time::Instant;

use lecollapse::engine::{
    born_statistics, estimate_collapse_time, microstep, run_ensemble, slip_delta,
    theoretical_moments, ChannelProbabilities, EngineError, RunResult, Sign, SlipParams,
};
use lecollapse::exact::{
    build_le_hamiltonian, evolve_observed, le_occupation, reconstruct_standard, BranchState,
    LatticeModel, Statistics,
};
use lecollapse::io::{read_manifest, run_experiment, ExperimentConfig, Mode};
use lecollapse::rng::stream_rng;
use lecollapse::wave::run_front;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Dense ordinary Hamiltonian over all labelled configurations, built
/// directly from the model definition.
fn dense_standard(model: &LatticeModel) -> (DMatrix<f64>, Vec<Vec<usize>>) {
    let (m, n) = (model.sites, model.atoms);
    let dim = m.pow(n as u32);
    let decode = |mut i: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let x = i % m;
                i /= m;
                x
            })
            .collect()
    };
    let encode = |pos: &[usize]| pos.iter().rev().fold(0, |acc, &x| acc * m + x);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut configs = Vec::with_capacity(dim);
    for i in 0..dim {
        let pos = decode(i);
        let mut diag = 0.0;
        for &x in &pos {
            diag +=
                model.u_strength * model.a_tracks.iter().filter(|t| t.contains(&x)).count() as f64;
        }
        for a in 0..n {
            for b in a + 1..n {
                if pos[a].abs_diff(pos[b]) <= model.contact_range {
                    diag += model.v_strength;
                }
            }
        }
        h[(i, i)] = diag;
        for a in 0..n {
            for y in [pos[a].wrapping_sub(1), pos[a] + 1] {
                if y < m {
                    let mut q = pos.clone();
                    q[a] = y;
                    h[(encode(&q), i)] += -model.hop_amplitude;
                }
            }
        }
        configs.push(pos);
    }
    (h, configs)
}

/// `exp(-i H t) psi0` through the eigendecomposition of symmetric `H`.
fn dense_evolve(h: &DMatrix<f64>, psi0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DVector::from_iterator(
        h.nrows(),
        eig.eigenvalues
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t)),
    );
    let coeff = v.adjoint() * psi0;
    &v * coeff.component_mul(&phases)
}

struct ExactTrajectory {
    sum_error: f64,
    hermitian_defect: f64,
    worst_drift_per_1000: f64,
    steps: usize,
}

fn criterion_exact() -> (Verdict, Verdict) {
    let t0 = Instant::now();
    let model = LatticeModel::single_channel(3, 2, 1.0, 1.0, 1.0, vec![0]);
    let h = build_le_hamiltonian(&model).expect("model builds");
    let state = BranchState::localized(&h, &[1, 2]).expect("valid positions");
    let t_end = 20.0;
    let steps = (t_end / h.default_dt()).ceil() as usize;
    let dt = t_end / steps as f64;
    let mut norms = vec![1.0];
    let fin = evolve_observed(&state, &h, dt, steps, |_, s| {
        norms.push(
            reconstruct_standard(s)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt(),
        );
    })
    .expect("evolution stays stable");

    let (dense, configs) = dense_standard(&model);
    let mut psi0 = DVector::<Complex64>::zeros(configs.len());
    let initial = reconstruct_standard(&state);
    let mut mapped = DVector::<Complex64>::zeros(configs.len());
    let reconstructed = reconstruct_standard(&fin);
    for (i, pos) in configs.iter().enumerate() {
        let p8: Vec<u8> = pos.iter().map(|&x| x as u8).collect();
        let c = h
            .basis
            .config_index(&p8)
            .expect("every configuration is in the basis");
        psi0[i] = initial[c];
        mapped[i] = reconstructed[c];
    }
    let exact = dense_evolve(&dense, &psi0, t_end);
    let sum_error = (mapped - exact).norm();
    let worst_drift_per_1000 = norms
        .windows(1001.min(norms.len()))
        .map(|w| (w[w.len() - 1] - w[0]).abs())
        .fold(0.0, f64::max);
    let traj = ExactTrajectory {
        sum_error,
        hermitian_defect: h.hermitian_defect,
        worst_drift_per_1000,
        steps,
    };
    let secs = t0.elapsed().as_secs_f64();
    let c1 = Verdict {
        id: 1,
        name: "sum property",
        pass: traj.sum_error <= 1e-6 && secs < 10.0,
        detail: format!(
            "||sum_s psi_s - psi_dense(20)|| = {:.3e} (limit 1e-6), {} RK4 steps, {secs:.2} s (limit 10 s)",
            traj.sum_error, traj.steps
        ),
    };
    let c3 = Verdict {
        id: 3,
        name: "non-Hermitian yet norm-preserving",
        pass: traj.hermitian_defect > 1e-6 && traj.worst_drift_per_1000 <= 1e-8,
        detail: format!(
            "hermitian defect {:.4} (> 1e-6), worst norm drift over 1000 steps {:.3e} (limit 1e-8)",
            traj.hermitian_defect, traj.worst_drift_per_1000
        ),
    };
    (c1, c3)
}

fn criterion_irreversibility() -> Verdict {
    let mut rng = stream_rng(2026, 2);
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut worst_rise: f64 = 0.0;
    let mut bad_runs = 0usize;
    for _ in 0..100 {
        let sites = rng.random_range(3..=4);
        let channels = rng.random_range(1..=2);
        let model = LatticeModel {
            sites,
            atoms: 2,
            channels,
            hop_amplitude: 1.0,
            u_strength: rng.random_range(0.3..2.0),
            v_strength: rng.random_range(0.3..2.0),
            a_tracks: (0..channels)
                .map(|_| vec![rng.random_range(0..sites)])
                .collect(),
            statistics: Statistics::Bosonic,
            hard_core: false,
            contact_range: 0,
            basis_cap: 1 << 20,
        };
        let h = build_le_hamiltonian(&model).expect("random model builds");
        let nc = h.basis.n_configs();
        // random symmetric wavefunction
        let mut psi = vec![Complex64::new(0.0, 0.0); nc];
        for (c, pos) in h.basis.configs.iter().enumerate() {
            let mut sorted = pos.clone();
            sorted.sort_unstable();
            let rep = h
                .basis
                .config_index(&sorted)
                .expect("sorted configuration exists");
            if rep == c {
                psi[c] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        for (c, pos) in h.basis.configs.iter().enumerate() {
            let mut sorted = pos.clone();
            sorted.sort_unstable();
            psi[c] = psi[h
                .basis
                .config_index(&sorted)
                .expect("sorted configuration exists")];
        }
        let state = BranchState::from_standard(h.basis.clone(), &psi).expect("nonzero state");
        let dt = h.default_dt();
        let steps = (5.0 / dt).ceil() as usize;
        let mut last = le_occupation(&state, 0);
        let mut run_bad = false;
        evolve_observed(&state, &h, dt, steps, |step, s| {
            if step % 10 == 0 {
                let now = le_occupation(s, 0);
                checked += 1;
                if now > last + 1e-12 {
                    violations += 1;
                    run_bad = true;
                    worst_rise = worst_rise.max(now - last);
                }
                last = now;
            }
        })
        .expect("evolution stays stable");
        bad_runs += run_bad as usize;
    }
    Verdict {
        id: 2,
        name: "irreversibility",
        pass: violations == 0,
        detail: format!(
            "{violations} increases of le_occupation(r=0) over {checked} recorded steps in {bad_runs}/100 trajectories, largest rise {worst_rise:.3e}"
        ),
    }
}

fn criterion_front() -> Verdict {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::defaults();
    let w = &cfg.wave;
    let run = run_front(
        &w.grid,
        &cfg.kinetic,
        &w.seed,
        w.dt,
        w.steps(),
        w.record_every,
    );
    let secs = t0.elapsed().as_secs_f64();
    match run {
        Ok(run) => match run.speed {
            Ok(sp) => {
                let width = run.history.last().expect("history is never empty").width;
                let rel = (sp.speed / sp.v_kpp - 1.0).abs();
                Verdict {
                    id: 4,
                    name: "front speed",
                    pass: rel < 0.05 && (0.5..=10.0).contains(&width) && secs < 60.0,
                    detail: format!(
                        "v = {:.4} vs 2 sqrt(D/tau) = {:.4} ({:+.2}%), v/v' = {:.4} (v' = {:.4}), width {width:.3} lambda, {secs:.1} s",
                        sp.speed,
                        sp.v_kpp,
                        100.0 * (sp.speed / sp.v_kpp - 1.0),
                        sp.speed / sp.v_sound,
                        sp.v_sound
                    ),
                }
            }
            Err(e) => Verdict {
                id: 4,
                name: "front speed",
                pass: false,
                detail: format!("speed fit failed: {e}"),
            },
        },
        Err(e) => Verdict {
            id: 4,
            name: "front speed",
            pass: false,
            detail: format!("front run failed: {e}"),
        },
    }
}

fn criterion_slip_formula() -> Verdict {
    let params = SlipParams::new(0.4, 100.0, 1.0, 1.0).expect("valid slip parameters");
    let p = ChannelProbabilities::new(vec![0.5, 0.5]).expect("valid p");
    let d = slip_delta(&p, 0, 0.5, 0.5, &params, Sign::Plus);
    let hand = 1.25e-4;
    let err = (d[0] - hand).abs().max((d[1] + hand).abs());
    let mut rng = stream_rng(5, 0);
    let mut nonzero = 0usize;
    let mut total = 0usize;
    for _ in 0..20_000 {
        let k = rng.random_range(2..=5);
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
        let total_weight: f64 = raw.iter().sum();
        let p = ChannelProbabilities::new(raw.iter().map(|x| x / total_weight).collect())
            .expect("normalized weights");
        let j = rng.random_range(0..k);
        let sign = if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let d = slip_delta(&p, j, rng.random(), rng.random(), &params, sign);
        total += 1;
        if d.iter().sum::<f64>() != 0.0 || d.iter().rev().sum::<f64>() != 0.0 {
            nonzero += 1;
        }
    }
    Verdict {
        id: 5,
        name: "slip formula",
        pass: err <= 1e-12 && nonzero == 0,
        detail: format!(
            "hand example error {err:.2e} (limit 1e-12); {nonzero}/{total} random deltas (K = 2..5) with nonzero sum"
        ),
    }
}

fn criterion_moments() -> Verdict {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::parse("collapse.p0 = 0.5, 0.5\n").expect("valid config");
    let c = &cfg.collapse;
    let fields = c.initial_fields().expect("uniform fields");
    let p = c.p0.clone();
    let theory = theoretical_moments(&p, &fields, &c.slip, c.dt);
    let mut rng = stream_rng(6, 0);
    let n = 1_000_000usize;
    let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let (next, _) = microstep(&p, &fields, &c.slip, c.dt, &mut rng).expect("interior step");
        let d1 = next.get(0) - p.get(0);
        let d2 = next.get(1) - p.get(1);
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
    }
    let nf = n as f64;
    let (v1, v2, cov) = (s11 / nf, s22 / nf, s12 / nf);
    let r1 = v1 / theory.variance[0];
    let r2 = v2 / theory.variance[1];
    let rc = cov / theory.covariance[0][1];
    let secs = t0.elapsed().as_secs_f64();
    let within = |r: f64| (r - 1.0).abs() < 0.10;
    Verdict {
        id: 6,
        name: "moment match",
        pass: within(r1) && within(r2) && within(rc) && cov < 0.0 && secs < 120.0,
        detail: format!(
            "MC/theory: var_1 {r1:.4}, var_2 {r2:.4}, cov_12 {rc:.4} (all need 1 +- 0.10); cov_12 = {cov:.3e} < 0; {secs:.1} s. \
             A zero-sum K = 2 step has cov = -var, while the closed form has cov = -2 var at this point"
        ),
    }
}

fn ensemble(
    p0: &str,
    seed: u64,
    runs: usize,
    record: bool,
) -> (Vec<RunResult>, usize, ChannelProbabilities, usize, f64) {
    let cfg = ExperimentConfig::parse(&format!("collapse.p0 = {p0}\n")).expect("valid config");
    let mut c = cfg.collapse.clone();
    c.record_trajectory = record;
    let t0 = Instant::now();
    let all = run_ensemble(&c, seed, runs);
    let secs = t0.elapsed().as_secs_f64();
    let mut ok = Vec::with_capacity(runs);
    let mut timeouts = 0;
    for r in all {
        match r {
            Ok(r) => ok.push(r),
            Err(EngineError::Timeout(_)) => timeouts += 1,
            Err(e) => panic!("collapse run failed: {e}"),
        }
    }
    (ok, timeouts, c.p0, c.max_steps, secs)
}

fn criteria_ensembles() -> (Verdict, Verdict) {
    let runs = 10_000;
    let (k2, timeouts2, p2, budget, secs2) = ensemble("0.3, 0.7", 8, runs, true);
    // martingale on the recorded K = 2 trajectories
    let checkpoints = [20usize, 80, 300];
    let mut lines = Vec::new();
    let mut mart_ok = timeouts2 == 0;
    for &s in &checkpoints {
        let xs: Vec<f64> = k2
            .iter()
            .map(|r| r.p_at_step(s).expect("trajectory recorded")[0])
            .collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let z = (mean - 0.3) / se;
        mart_ok &= z.abs() < 3.0;
        let absorbed = k2.iter().filter(|r| r.steps <= s).count();
        lines.push(format!(
            "step {s}: mean {mean:.4}, {z:+.2} SE ({absorbed} absorbed)"
        ));
    }
    let c7 = Verdict {
        id: 7,
        name: "martingale",
        pass: mart_ok,
        detail: format!("{} runs; {}", k2.len(), lines.join("; ")),
    };

    let (k3, timeouts3, p3, _, secs3) = ensemble("0.2, 0.3, 0.5", 9, runs, false);
    let mut born_ok = timeouts2 == 0 && timeouts3 == 0 && secs2 + secs3 < 600.0;
    let mut lines = Vec::new();
    for (results, p0) in [(&k2, &p2), (&k3, &p3)] {
        let stats = born_statistics(results, p0).expect("enough runs");
        let n = stats.runs as f64;
        let mut parts = Vec::new();
        for (k, &f) in stats.frequencies.iter().enumerate() {
            let p = p0.get(k);
            let sigma = (p * (1.0 - p) / n).sqrt();
            born_ok &= (f - p).abs() < 3.0 * sigma;
            parts.push(format!("{f:.4} (p {p}, {:+.2} sigma)", (f - p) / sigma));
        }
        lines.push(format!(
            "[{}] chi2 p = {:.3}",
            parts.join(", "),
            stats.p_value
        ));
    }
    let median = |rs: &[RunResult]| {
        let mut s: Vec<usize> = rs.iter().map(|r| r.steps).collect();
        s.sort_unstable();
        s.get(s.len() / 2).copied().unwrap_or(0)
    };
    let c8 = Verdict {
        id: 8,
        name: "Born rule",
        pass: born_ok,
        detail: format!(
            "{} | absorbed {}/{runs} and {}/{runs} within {budget} steps (median {} and {}); {:.0} s",
            lines.join(" | "),
            k2.len(),
            k3.len(),
            median(&k2),
            median(&k3),
            secs2 + secs3
        ),
    };
    (c7, c8)
}

fn criterion_fp() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut cfg =
        ExperimentConfig::parse("mode = compare\nformats = json\n").expect("valid config");
    cfg.out = dir.path().to_path_buf();
    if let Err(e) = run_experiment(&cfg) {
        return Verdict {
            id: 9,
            name: "FP boundary obstruction",
            pass: false,
            detail: format!("compare run failed: {e}"),
        };
    }
    let text = std::fs::read_to_string(dir.path().join("compare.json")).expect("compare report");
    let report: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    let last = report["checkpoints"]
        .as_array()
        .and_then(|a| a.last())
        .cloned()
        .unwrap_or_default();
    let retained = last["fp_retained_fraction"].as_f64().unwrap_or(0.0);
    let absorbed = last["mc_absorbed_fraction"].as_f64().unwrap_or(0.0);
    let steps = last["fp_step"].as_u64().unwrap_or(0);
    Verdict {
        id: 9,
        name: "FP boundary obstruction",
        pass: steps == 100_000 && retained >= 0.999 && absorbed >= 0.5,
        detail: format!(
            "after {steps} density steps (t = {:.4} tau): density keeps {:.6} of its mass, matched ensemble of {} has absorbed {:.3}",
            last["time"].as_f64().unwrap_or(f64::NAN),
            retained,
            report["runs"],
            absorbed
        ),
    }
}

fn criterion_timescale() -> Verdict {
    let mut unit = SlipParams::new(0.4, 1.0, 1.0, 1.0)
        .and_then(|p| p.with_ceiling(1.0))
        .expect("valid slip parameters");
    unit.w = 1.0;
    let t1 = estimate_collapse_time(&unit, 1.0, None).expect("positive inputs");
    let t2 = estimate_collapse_time(&unit, 2.0, None).expect("positive inputs");
    let t3 = estimate_collapse_time(&unit, 3.0, None).expect("positive inputs");
    let t6 = estimate_collapse_time(&unit, 6.0, None).expect("positive inputs");
    let structural = t1 == 1.0 && t2 == t1 / 4.0 && t6 == t3 / 4.0;

    let physical = ExperimentConfig::parse(
        &std::fs::read_to_string(repo_root().join("configs/physical_argon.conf"))
            .expect("shipped config"),
    )
    .expect("shipped config is valid");
    let tau_c = estimate_collapse_time(&physical.collapse.slip, physical.timescale.l_system, None)
        .expect("positive inputs");
    let ratio = tau_c / 1e-10;
    let doc =
        std::fs::read_to_string(repo_root().join("docs/physical_scale.md")).unwrap_or_default();
    let shown = format!("{tau_c:.3e}");
    let documented = doc.contains(&shown) && doc.contains(&format!("{ratio:.3e}"));
    Verdict {
        id: 10,
        name: "collapse time scale",
        pass: structural && documented,
        detail: format!(
            "unit case {t1}, L doubling x{} (exact: {structural}); shipped argon set tau_c = {shown} s, {ratio:.3e} of 1e-10 s (in docs: {documented})",
            t2 / t1
        ),
    }
}

fn payloads(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json")))
        .filter(|p| p.file_name().and_then(|n| n.to_str()) != Some("manifest.json"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).expect("readable"),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_determinism() -> Verdict {
    let cases = [
        (
            Mode::Collapse,
            "seed = 42\ntrajectory = true\ncollapse.p0 = 0.2, 0.3, 0.5\n",
        ),
        (Mode::Sweep, "seeds = 100..110\n"),
        (Mode::Wave, "wave.extent = 100\nwave.t_end = 60\n"),
        (Mode::Exact, "exact.t_end = 5\n"),
        (Mode::Fp, "fp.steps = 5000\n"),
    ];
    let mut identical = true;
    let mut files = 0;
    for (mode, text) in cases {
        let mut cfg = ExperimentConfig::parse(text).expect("valid config");
        cfg.mode = Some(mode);
        let mut runs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().expect("temp dir");
            cfg.out = dir.path().to_path_buf();
            run_experiment(&cfg).expect("run succeeds");
            let manifest = read_manifest(dir.path())
                .expect("manifest")
                .without_timing();
            runs.push((payloads(dir.path()), manifest));
        }
        identical &= runs[0] == runs[1];
        files += runs[0].0.len();
    }
    Verdict {
        id: 11,
        name: "determinism",
        pass: identical,
        detail: format!(
            "5 modes run twice: {files} CSV/JSON payloads and manifests identical: {identical}"
        ),
    }
}

fn report(v: &Verdict) {
    println!(
        "criterion {:>2} {}: {}: {}",
        v.id,
        if v.pass { "PASS" } else { "FAIL" },
        v.name,
        v.detail
    );
}

fn main() {
    let start = Instant::now();
    let mut verdicts = Vec::new();
    let mut push = |v: Verdict| {
        report(&v);
        verdicts.push(v);
    };
    let (c1, c3) = criterion_exact();
    push(c1);
    push(criterion_irreversibility());
    push(c3);
    push(criterion_front());
    push(criterion_slip_formula());
    push(criterion_moments());
    let (c7, c8) = criteria_ensembles();
    push(c7);
    push(c8);
    push(criterion_fp());
    push(criterion_timescale());
    push(criterion_determinism());
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!(
        "acceptance: {passed}/{} criteria pass in {:.0} s",
        verdicts.len(),
        start.elapsed().as_secs_f64()
    );
    if passed < verdicts.len() && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
