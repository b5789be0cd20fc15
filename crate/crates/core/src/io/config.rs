// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` configuration.
//!
//! One assignment per line; `#` starts a comment; keys are dotted
//! (`slip.w`, `collapse.p0`). Every key is optional and unknown keys are
//! errors. See `docs/config.md` for the full list.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{
    ChannelProbabilities, CollapseConfig, CollisionRate, FieldInit, SlipParams, W_CEILING,
};
use crate::exact::{LatticeModel, Statistics, DEFAULT_BASIS_CAP};
use crate::wave::{Grid, KineticParams, Region};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` is set twice")]
    Duplicate { line: usize, key: String },
    #[error("{}`{key}` {constraint}", line_prefix(*.line))]
    Invalid {
        key: String,
        line: Option<usize>,
        constraint: String,
    },
    #[error("relation {relation} violated: {detail}")]
    Relation {
        relation: &'static str,
        detail: String,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("no mode given: set `mode` or use a subcommand")]
    MissingMode,
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Wave,
    Collapse,
    Fp,
    Sweep,
    Compare,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "exact" => Mode::Exact,
            "wave" => Mode::Wave,
            "collapse" => Mode::Collapse,
            "fp" => Mode::Fp,
            "sweep" => Mode::Sweep,
            "compare" => Mode::Compare,
            _ => {
                return Err(format!(
                    "unknown mode `{s}` (exact, wave, collapse, fp, sweep, compare)"
                ))
            }
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Exact => "exact",
            Mode::Wave => "wave",
            Mode::Collapse => "collapse",
            Mode::Fp => "fp",
            Mode::Sweep => "sweep",
            Mode::Compare => "compare",
        };
        f.write_str(s)
    }
}

/// Requested output kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
            svg: true,
        }
    }
}

impl FromStr for Formats {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut f = Formats {
            csv: false,
            json: false,
            svg: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                _ => return Err(format!("unknown format `{part}` (csv, json, svg)")),
            }
        }
        Ok(f)
    }
}

/// Half-open seed range `A..B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn iter(&self) -> std::ops::Range<u64> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

impl FromStr for SeedRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
        let start: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad range start `{a}`"))?;
        let end: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad range end `{b}`"))?;
        if end <= start {
            return Err(format!("empty seed range {start}..{end}"));
        }
        Ok(Self { start, end })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExactSettings {
    pub model: LatticeModel,
    /// Atom positions of the initial state.
    pub initial: Vec<usize>,
    /// Sites of the cell used for local probabilities.
    pub cell: Vec<usize>,
    pub t_end: f64,
    pub step_factor: f64,
    pub record_every: usize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WaveSettings {
    pub grid: Grid,
    pub seed: Region,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
}

impl WaveSettings {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Inputs of the collapse time-scale estimate.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TimescaleSettings {
    /// Linear size of the macroscopic system.
    pub l_system: f64,
    /// Electron-cloud size for the refined estimate.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FpSettings {
    pub resolution: usize,
    pub sigma: f64,
    pub steps: usize,
    pub dt_factor: f64,
    pub record_every: usize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CompareSettings {
    pub runs: usize,
    pub bins: usize,
    /// Density step counts at which the ensemble is compared.
    pub checkpoints: Vec<usize>,
}

/// A fully validated experiment.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub seed: u64,
    pub seeds: Option<SeedRange>,
    pub out: PathBuf,
    pub formats: Formats,
    pub trajectory: bool,
    pub kinetic: KineticParams,
    pub exact: ExactSettings,
    pub wave: WaveSettings,
    pub collapse: CollapseConfig,
    pub fp: FpSettings,
    pub compare: CompareSettings,
    pub timescale: TimescaleSettings,
}

impl ExperimentConfig {
    /// Every key at its default.
    pub fn defaults() -> Self {
        Self::parse("").expect("defaults are valid")
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut e = Entries::read(text)?;
        let cfg = build(&mut e)?;
        e.finish()?;
        Ok(cfg)
    }

    /// Hex SHA-256 of the resolved configuration, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let canonical = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn mode(&self) -> Result<Mode, ConfigError> {
        self.mode.ok_or(ConfigError::MissingMode)
    }

    /// Seeds to run: the range if one is set, otherwise the single seed.
    pub fn seed_list(&self) -> Vec<u64> {
        match self.seeds {
            Some(r) => r.iter().collect(),
            None => vec![self.seed],
        }
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    ExperimentConfig::parse(&text)
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn read(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = k.trim().to_string();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("malformed key `{}`", k.trim()),
                });
            }
            if map.contains_key(&key) {
                return Err(ConfigError::Duplicate { line, key });
            }
            map.insert(key, (line, v.trim().to_string()));
        }
        Ok(Self { map })
    }

    fn take<T>(
        &mut self,
        key: &str,
        default: T,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<(T, Option<usize>), ConfigError> {
        match self.map.remove(key) {
            None => Ok((default, None)),
            Some((line, v)) => parse(&v)
                .map(|t| (t, Some(line)))
                .map_err(|m| ConfigError::Parse {
                    line,
                    message: format!("`{key}`: {m}"),
                }),
        }
    }

    fn value<T: FromStr>(
        &mut self,
        key: &str,
        default: T,
    ) -> Result<(T, Option<usize>), ConfigError> {
        self.take(key, default, |s| {
            s.parse::<T>().map_err(|_| format!("cannot parse `{s}`"))
        })
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.map.into_iter().min_by_key(|(_, (l, _))| *l) {
            Some((key, (line, _))) => Err(ConfigError::UnknownKey { line, key }),
            None => Ok(()),
        }
    }
}

fn list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| format!("cannot parse list item `{p}`"))
        })
        .collect()
}

fn tracks(s: &str) -> Result<Vec<Vec<usize>>, String> {
    s.split(';').map(list::<usize>).collect()
}

fn intervals(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(';')
        .map(|t| {
            let (a, b) = t
                .split_once("..")
                .ok_or_else(|| format!("expected lo..hi, got `{t}`"))?;
            let lo = a
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("bad bound `{a}`"))?;
            let hi = b
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("bad bound `{b}`"))?;
            Ok((lo, hi))
        })
        .collect()
}

fn invalid(key: &str, line: Option<usize>, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        line,
        constraint: constraint.into(),
    }
}

fn positive(key: &str, (v, line): (f64, Option<usize>)) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, line, format!("must be positive, got {v}")))
    }
}

fn at_least(
    key: &str,
    (v, line): (usize, Option<usize>),
    min: usize,
) -> Result<usize, ConfigError> {
    if v >= min {
        Ok(v)
    } else {
        Err(invalid(
            key,
            line,
            format!("must be at least {min}, got {v}"),
        ))
    }
}

#[derive(Clone, Copy)]
enum DtChoice {
    Auto,
    Fixed(f64),
}

fn build(e: &mut Entries) -> Result<ExperimentConfig, ConfigError> {
    let (mode, _) = e.take("mode", None, |s| s.parse::<Mode>().map(Some))?;
    let (seed, _) = e.value("seed", 0u64)?;
    let (seeds, _) = e.take("seeds", None, |s| s.parse::<SeedRange>().map(Some))?;
    let (out, _) = e.value("out", PathBuf::from("out"))?;
    let (formats, _) = e.value("formats", Formats::default())?;
    let (trajectory, _) = e.value("trajectory", false)?;

    let lambda = positive("lambda", e.value("lambda", 1.0)?)?;
    let tau = positive("tau", e.value("tau", 1.0)?)?;
    let kinetic =
        KineticParams::new(lambda, tau).map_err(|m| invalid("lambda", None, m.to_string()))?;
    if let (Some(d), line) = e.take("d_coeff", None, |s| {
        s.parse::<f64>()
            .map(Some)
            .map_err(|_| format!("cannot parse `{s}`"))
    })? {
        if (d - kinetic.d_coeff).abs() > 1e-12 * kinetic.d_coeff {
            return Err(ConfigError::Relation {
                relation: "D = λ²/6τ",
                detail: format!(
                    "{}d_coeff = {d} but lambda^2/(6 tau) = {}",
                    line_prefix(line),
                    kinetic.d_coeff
                ),
            });
        }
    }

    let exact = build_exact(e)?;
    let wave = build_wave(e, &kinetic)?;
    let collapse = build_collapse(e, &kinetic)?;

    let fp = FpSettings {
        resolution: at_least("fp.resolution", e.value("fp.resolution", 100usize)?, 3)?,
        sigma: positive("fp.sigma", e.value("fp.sigma", 0.02)?)?,
        steps: e.value("fp.steps", 100_000usize)?.0,
        dt_factor: {
            let (v, line) = e.value("fp.dt_factor", 0.9)?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(invalid(
                    "fp.dt_factor",
                    line,
                    format!("must lie in (0, 1], got {v}"),
                ));
            }
            v
        },
        record_every: at_least("fp.record_every", e.value("fp.record_every", 1000usize)?, 1)?,
    };
    if collapse.p0.len() > 3 {
        return Err(invalid(
            "collapse.p0",
            None,
            "the density solver supports K = 2 and K = 3 only",
        ));
    }

    let compare = CompareSettings {
        runs: at_least("compare.runs", e.value("compare.runs", 2000usize)?, 1)?,
        bins: at_least("compare.bins", e.value("compare.bins", 20usize)?, 3)?,
        checkpoints: e
            .take("compare.checkpoints", vec![2000, 100_000], list::<usize>)?
            .0,
    };
    if fp.resolution % compare.bins != 0 {
        return Err(invalid(
            "compare.bins",
            None,
            format!("must divide fp.resolution = {}", fp.resolution),
        ));
    }

    let timescale = TimescaleSettings {
        l_system: positive(
            "timescale.l_system",
            e.value("timescale.l_system", 100.0 * kinetic.lambda)?,
        )?,
        delta: match e.take("timescale.delta", None, |s| {
            s.parse::<f64>()
                .map(Some)
                .map_err(|_| format!("cannot parse `{s}`"))
        })? {
            (Some(d), line) => Some(positive("timescale.delta", (d, line))?),
            (None, _) => None,
        },
    };

    Ok(ExperimentConfig {
        mode,
        seed,
        seeds,
        out,
        formats,
        trajectory,
        kinetic,
        exact,
        wave,
        collapse,
        fp,
        compare,
        timescale,
    })
}

fn build_exact(e: &mut Entries) -> Result<ExactSettings, ConfigError> {
    let sites = at_least("exact.sites", e.value("exact.sites", 3usize)?, 1)?;
    let atoms = at_least("exact.atoms", e.value("exact.atoms", 2usize)?, 1)?;
    let (channels, cline) = e.value("exact.channels", 1usize)?;
    if channels == 0 {
        return Err(invalid(
            "exact.channels",
            cline,
            "K = 0: at least one channel is required",
        ));
    }
    let default_tracks: Vec<Vec<usize>> = (0..channels)
        .map(|k| vec![(k * (sites - 1)) % sites])
        .collect();
    let (a_tracks, tline) = e.take("exact.tracks", default_tracks, tracks)?;
    let (statistics, _) = e.take("exact.statistics", Statistics::Bosonic, |s| match s {
        "bosonic" => Ok(Statistics::Bosonic),
        "distinguishable" => Ok(Statistics::Distinguishable),
        _ => Err(format!("expected bosonic or distinguishable, got `{s}`")),
    })?;
    let model = LatticeModel {
        sites,
        atoms,
        channels,
        hop_amplitude: e.value("exact.hop", 1.0)?.0,
        u_strength: e.value("exact.u", 1.0)?.0,
        v_strength: e.value("exact.v", 1.0)?.0,
        a_tracks,
        statistics,
        hard_core: e.value("exact.hard_core", false)?.0,
        contact_range: e.value("exact.contact_range", 0usize)?.0,
        basis_cap: at_least(
            "exact.basis_cap",
            e.value("exact.basis_cap", DEFAULT_BASIS_CAP)?,
            1,
        )?,
    };
    model
        .validate()
        .map_err(|m| invalid("exact.tracks", tline, m.to_string()))?;
    let default_initial: Vec<usize> = (0..atoms).map(|a| (a + 1) % sites).collect();
    let (initial, iline) = e.take("exact.initial", default_initial, list::<usize>)?;
    if initial.len() != atoms || initial.iter().any(|&x| x >= sites) {
        return Err(invalid(
            "exact.initial",
            iline,
            format!("needs {atoms} positions in 0..{sites}"),
        ));
    }
    let (cell, cell_line) = e.take("exact.cell", vec![0], list::<usize>)?;
    if cell.is_empty() || cell.iter().any(|&x| x >= sites) {
        return Err(invalid(
            "exact.cell",
            cell_line,
            format!("needs sites in 0..{sites}"),
        ));
    }
    let step_factor = positive("exact.step_factor", e.value("exact.step_factor", 0.05)?)?;
    if step_factor > 2.5 {
        return Err(invalid(
            "exact.step_factor",
            None,
            "must not exceed the RK4 limit 2.5",
        ));
    }
    Ok(ExactSettings {
        model,
        initial,
        cell,
        t_end: positive("exact.t_end", e.value("exact.t_end", 20.0)?)?,
        step_factor,
        record_every: at_least(
            "exact.record_every",
            e.value("exact.record_every", 20usize)?,
            1,
        )?,
    })
}

fn build_wave(e: &mut Entries, kinetic: &KineticParams) -> Result<WaveSettings, ConfigError> {
    let (dims, dline) = e.value("wave.dims", 1usize)?;
    if !(1..=3).contains(&dims) {
        return Err(invalid("wave.dims", dline, "must be 1, 2 or 3"));
    }
    let extent = positive(
        "wave.extent",
        e.value("wave.extent", 400.0 * kinetic.lambda)?,
    )?;
    let spacing = positive(
        "wave.spacing",
        e.value("wave.spacing", kinetic.lambda / 4.0)?,
    )?;
    let n = (extent / spacing).round() as usize;
    let grid = Grid::new(vec![n.max(1); dims], spacing)
        .map_err(|m| invalid("wave.extent", None, m.to_string()))?;
    grid.check_resolution(kinetic)
        .map_err(|m| invalid("wave.spacing", None, m.to_string()))?;
    let lo = e.value("wave.seed_lo", 0.0)?.0;
    let hi = e.value("wave.seed_hi", kinetic.lambda)?.0;
    let seed = Region::Box {
        lo: vec![lo; dims],
        hi: vec![hi; dims],
    };
    crate::wave::seed_field(&grid, &seed)
        .map_err(|m| invalid("wave.seed_lo", None, m.to_string()))?;
    let (dt, dt_line) = e.value("wave.dt", 0.01 * kinetic.tau)?;
    let limit = grid.cfl_limit(kinetic);
    if !(dt > 0.0) || dt > limit {
        return Err(invalid(
            "wave.dt",
            dt_line,
            format!("must satisfy 0 < dt <= h^2/(2 dims D) = {limit}"),
        ));
    }
    Ok(WaveSettings {
        grid,
        seed,
        dt,
        t_end: positive("wave.t_end", e.value("wave.t_end", 300.0 * kinetic.tau)?)?,
        record_every: at_least(
            "wave.record_every",
            e.value("wave.record_every", 100usize)?,
            1,
        )?,
    })
}

fn build_collapse(e: &mut Entries, kinetic: &KineticParams) -> Result<CollapseConfig, ConfigError> {
    let (w, wline) = e.value("slip.w", 0.4)?;
    let n_a = positive("slip.n_a", e.value("slip.n_a", 1.0)?)?;
    let ceiling = positive("slip.w_ceiling", e.value("slip.w_ceiling", W_CEILING)?)?;
    if !(w > 0.0) || w > ceiling {
        return Err(invalid(
            "slip.w",
            wline,
            format!("must satisfy 0 < W <= {ceiling}, got {w}"),
        ));
    }
    let n_c_derived = n_a * kinetic.lambda.powi(3);
    if let (Some(n_c), line) = e.take("slip.n_c", None, |s| {
        s.parse::<f64>()
            .map(Some)
            .map_err(|_| format!("cannot parse `{s}`"))
    })? {
        if (n_c - n_c_derived).abs() > 1e-12 * n_c_derived {
            return Err(ConfigError::Relation {
                relation: "N_c = n_a·λ³",
                detail: format!(
                    "{}slip.n_c = {n_c} but n_a lambda^3 = {n_c_derived}",
                    line_prefix(line)
                ),
            });
        }
    }
    if n_c_derived < 1.0 {
        return Err(invalid(
            "slip.n_a",
            None,
            format!("N_c = n_a lambda^3 = {n_c_derived} must be >= 1"),
        ));
    }
    let (p0, pline) = e.take("collapse.p0", vec![0.3, 0.7], list::<f64>)?;
    let p0 =
        ChannelProbabilities::new(p0).map_err(|m| invalid("collapse.p0", pline, m.to_string()))?;
    if p0.len() < 2 {
        return Err(invalid("collapse.p0", pline, "needs at least two channels"));
    }
    let k = p0.len();
    let (f_ref, fref_line) = e.value("slip.f_ref", 0.4)?;
    let (rate, rline) = e.take("slip.rate", CollisionRate::Matched { f_ref }, |s| match s {
        "matched" => Ok(CollisionRate::Matched { f_ref }),
        "nominal" => Ok(CollisionRate::Nominal),
        v => v
            .parse::<f64>()
            .map(CollisionRate::Fixed)
            .map_err(|_| format!("expected matched, nominal or a number, got `{v}`")),
    })?;
    if matches!(rate, CollisionRate::Matched { .. }) && !(f_ref > 0.0 && f_ref < 1.0) {
        return Err(invalid("slip.f_ref", fref_line, "must lie in (0, 1)"));
    }
    if let CollisionRate::Fixed(r) = rate {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(invalid("slip.rate", rline, "must be nonnegative"));
        }
    }
    let slip = SlipParams::new(w, n_a, kinetic.lambda, kinetic.tau)
        .and_then(|p| p.with_ceiling(ceiling))
        .and_then(|p| p.with_rate(rate, k))
        .map_err(|m| invalid("slip.w", wline, m.to_string()))?;

    let cells = at_least("collapse.cells", e.value("collapse.cells", 512usize)?, 1)?;
    let spacing = positive(
        "collapse.spacing",
        e.value("collapse.spacing", kinetic.lambda / 4.0)?,
    )?;
    let transverse = positive(
        "collapse.transverse",
        e.value("collapse.transverse", 4.0 * kinetic.lambda.powi(2))?,
    )?;
    let grid = Grid::with_transverse(vec![cells], spacing, transverse)
        .map_err(|m| invalid("collapse.cells", None, m.to_string()))?;
    let (field, field_line) = e.value("collapse.field", "0.4".to_string())?;
    let fields = if field == "seeded" {
        let (regions, rl) = e.take("collapse.seed_regions", Vec::new(), intervals)?;
        if regions.len() != k {
            return Err(invalid(
                "collapse.seed_regions",
                rl,
                format!("needs one lo..hi interval per channel ({k})"),
            ));
        }
        FieldInit::Seeded(
            regions
                .into_iter()
                .map(|(lo, hi)| Region::Box {
                    lo: vec![lo],
                    hi: vec![hi],
                })
                .collect(),
        )
    } else {
        let level: f64 = field.parse().map_err(|_| {
            invalid(
                "collapse.field",
                field_line,
                format!("expected a level or `seeded`, got `{field}`"),
            )
        })?;
        if !(0.0..=1.0).contains(&level) {
            return Err(invalid(
                "collapse.field",
                field_line,
                "level must lie in [0, 1]",
            ));
        }
        FieldInit::Uniform(level)
    };
    let (dt_choice, dt_line) = e.take("collapse.dt", DtChoice::Auto, |s| match s {
        "auto" => Ok(DtChoice::Auto),
        v => v
            .parse::<f64>()
            .map(DtChoice::Fixed)
            .map_err(|_| format!("expected auto or a number, got `{v}`")),
    })?;
    let target = positive(
        "collapse.mean_target",
        e.value("collapse.mean_target", 0.04)?,
    )?;
    let mut config = CollapseConfig {
        grid,
        kinetic: *kinetic,
        slip,
        p0,
        fields,
        dt: kinetic.tau,
        max_steps: e.value("collapse.max_steps", 100_000usize)?.0,
        record_trajectory: false,
        static_fields: e.value("collapse.static_fields", false)?.0,
    };
    let initial = config
        .initial_fields()
        .map_err(|m| invalid("collapse.field", field_line, m.to_string()))?;
    config.dt = match dt_choice {
        DtChoice::Fixed(v) => v,
        DtChoice::Auto => CollapseConfig::dt_for_mean(&config.grid, &config.slip, &initial, target)
            .map_err(|m| invalid("collapse.dt", dt_line, m.to_string()))?,
    };
    if !config.static_fields {
        let limit = config.grid.cfl_limit(kinetic);
        if config.dt > limit {
            return Err(invalid(
                "collapse.dt",
                dt_line,
                format!("exceeds the field CFL bound {limit}"),
            ));
        }
    }
    config
        .validate()
        .map_err(|m| invalid("collapse.dt", dt_line, m.to_string()))?;
    Ok(config)
}
