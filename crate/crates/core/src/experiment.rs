//! Ensemble experiments: generate matrices, compute exact and estimated
//! success probabilities for each, and aggregate the comparison.
//!
//! Configs are flat `key = value` text; `#` starts a comment.
//!
//! | key           | value                                        | default            |
//! |---------------|----------------------------------------------|--------------------|
//! | `kind`        | `random-symmetric`, `local-H1`, `local-H2`   | required           |
//! | `order`       | matrix order N                               | required (or `qubits`) |
//! | `qubits`      | n, sets N = 2^n                              |                    |
//! | `density`     | off-diagonal density, random-symmetric only  | 0.5                |
//! | `trials`      | number of matrices                           | 20                 |
//! | `seed`        | master seed                                  | 0                  |
//! | `run_engines` | also simulate phase estimation per trial     | false              |
//! | `m`           | phase-register qubits for engine runs        | 10                 |
//! | `engine`      | `spectral` or `dense`                        | spectral           |
//! | `csv`         | output CSV path                              | none               |
//! | `svg`         | output SVG path                              | none               |
//! | `plot`        | write the SVG when `svg` is set              | true               |
//! | `threads`     | worker count (else `PERRON_PEA_THREADS`)     | all cores          |
//!
//! Relative paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{EnsembleConfig, EnsembleKind};
use crate::probability::{analyze, Analysis, ProbabilityReport};
use crate::qpe::{condition_on_zero, run_dense_with_spectrum, spectral_summary, Engine, QpeConfig};

pub const THREADS_ENV: &str = "PERRON_PEA_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleConfig,
    pub run_engines: bool,
    pub m: u32,
    pub engine: Engine,
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub plot: bool,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(kind: EnsembleKind, order: usize, trials: usize, seed: u64) -> Self {
        Self {
            ensemble: EnsembleConfig {
                kind,
                order,
                density: 0.5,
                trial_count: trials,
                seed,
            },
            run_engines: false,
            m: 10,
            engine: Engine::Spectral,
            csv_path: None,
            svg_path: None,
            plot: true,
            threads: None,
        }
    }

    /// Desk-scale default: 20 trials.
    pub fn desk(kind: EnsembleKind, order: usize, seed: u64) -> Self {
        Self::new(kind, order, 20, seed)
    }

    /// The full-size comparison: N = 4096 with 50 trials. Expect a long run.
    pub fn full_scale(kind: EnsembleKind, seed: u64) -> Self {
        Self::new(kind, 4096, 50, seed)
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.run_engines {
            if !(1..=crate::qpe::MAX_SPECTRAL_M).contains(&self.m) {
                return Err(Error::config(format!("m = {} out of range", self.m)));
            }
            if self.engine == Engine::Dense
                && (self.m > crate::qpe::MAX_DENSE_M
                    || self.ensemble.order > 1 << crate::qpe::MAX_DENSE_QUBITS)
            {
                return Err(Error::config("dense engine limited to n <= 8 and m <= 12"));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads must be at least 1"));
        }
        Ok(())
    }

    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut kind = None;
        let mut order = None;
        let mut cfg = Self::new(EnsembleKind::RandomSymmetric, 0, 20, 0);
        let resolve = |v: &str| {
            let p = PathBuf::from(v);
            match base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            }
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::config(format!("line {}: {msg}", idx + 1));
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(format!("expected `key = value`, got {line:?}")))?;
            let num = |v: &str| v.parse::<u64>().map_err(|_| bad(format!("{key}: invalid integer {v:?}")));
            let boolean = |v: &str| v.parse::<bool>().map_err(|_| bad(format!("{key}: expected true or false")));
            match key {
                "kind" => kind = Some(value.parse::<EnsembleKind>().map_err(|e| bad(e.to_string()))?),
                "order" => order = Some(num(value)? as usize),
                "qubits" => {
                    let n = num(value)?;
                    if n > 30 {
                        return Err(bad(format!("{n} qubits is too many")));
                    }
                    order = Some(1usize << n);
                }
                "density" => {
                    cfg.ensemble.density =
                        value.parse().map_err(|_| bad(format!("density: invalid number {value:?}")))?
                }
                "trials" => cfg.ensemble.trial_count = num(value)? as usize,
                "seed" => cfg.ensemble.seed = num(value)?,
                "run_engines" => cfg.run_engines = boolean(value)?,
                "m" => cfg.m = num(value)? as u32,
                "engine" => cfg.engine = value.parse().map_err(|e: Error| bad(e.to_string()))?,
                "csv" => cfg.csv_path = Some(resolve(value)),
                "svg" => cfg.svg_path = Some(resolve(value)),
                "plot" => cfg.plot = boolean(value)?,
                "threads" => cfg.threads = Some(num(value)? as usize),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        cfg.ensemble.kind = kind.ok_or_else(|| Error::config("missing `kind`"))?;
        cfg.ensemble.order = order.ok_or_else(|| Error::config("missing `order` or `qubits`"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }
}

/// Engine outcome for one trial: the simulated all-zero probability and the
/// conditional mass on the principal bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOutcome {
    pub p_zero: f64,
    pub principal_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub order: usize,
    pub seed: u64,
    pub kind: EnsembleKind,
    /// `Err` carries the failure message; failed trials keep their row.
    pub outcome: std::result::Result<ProbabilityReport, String>,
    pub engine: Option<EngineOutcome>,
}

impl TrialRow {
    pub fn report(&self) -> Option<&ProbabilityReport> {
        self.outcome.as_ref().ok()
    }
}

/// Summary statistics over the successful rows of a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    pub rows_ok: usize,
    pub rows_failed: usize,
    pub median_alpha1_sq: f64,
    pub median_p_reg2: f64,
    pub median_p_reg1: f64,
    pub median_alpha1_sq_est: f64,
    pub median_p_reg2_est: f64,
    pub median_p_reg1_est: f64,
    pub mean_alpha1_sq: f64,
    pub mean_p_reg2: f64,
    pub mean_p_reg1: f64,
    pub mean_alpha1_sq_est: f64,
    pub mean_p_reg2_est: f64,
    pub mean_p_reg1_est: f64,
    pub median_abs_err_alpha1_sq: f64,
    pub median_abs_err_p_reg2: f64,
    pub median_abs_err_p_reg1: f64,
    /// Spearman correlation between estimated and computed `P_reg1`.
    pub rank_corr_p_reg1: f64,
    /// Fraction of rows with `P_reg1 >= alpha1^2`.
    pub frac_p_reg1_ge_alpha1_sq: f64,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; NaN when either side is constant or fewer than two points.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean(&rx), mean(&ry));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        f64::NAN
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

impl Aggregates {
    pub fn from_rows(rows: &[TrialRow]) -> Self {
        let reports: Vec<&ProbabilityReport> = rows.iter().filter_map(TrialRow::report).collect();
        let col = |f: fn(&ProbabilityReport) -> f64| reports.iter().map(|r| f(r)).collect::<Vec<f64>>();
        let alpha = col(|r| r.alpha1_sq);
        let p2 = col(|r| r.p_reg2);
        let p1 = col(|r| r.p_reg1);
        let alpha_e = col(|r| r.alpha1_sq_est);
        let p2_e = col(|r| r.p_reg2_est);
        let p1_e = col(|r| r.p_reg1_est);
        let abs_err = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>();
        let ge = reports.iter().filter(|r| r.p_reg1 >= r.alpha1_sq).count();
        Self {
            rows_ok: reports.len(),
            rows_failed: rows.len() - reports.len(),
            median_alpha1_sq: median(&alpha),
            median_p_reg2: median(&p2),
            median_p_reg1: median(&p1),
            median_alpha1_sq_est: median(&alpha_e),
            median_p_reg2_est: median(&p2_e),
            median_p_reg1_est: median(&p1_e),
            mean_alpha1_sq: mean(&alpha),
            mean_p_reg2: mean(&p2),
            mean_p_reg1: mean(&p1),
            mean_alpha1_sq_est: mean(&alpha_e),
            mean_p_reg2_est: mean(&p2_e),
            mean_p_reg1_est: mean(&p1_e),
            median_abs_err_alpha1_sq: median(&abs_err(&alpha_e, &alpha)),
            median_abs_err_p_reg2: median(&abs_err(&p2_e, &p2)),
            median_abs_err_p_reg1: median(&abs_err(&p1_e, &p1)),
            rank_corr_p_reg1: spearman(&p1_e, &p1),
            frac_p_reg1_ge_alpha1_sq: if reports.is_empty() {
                f64::NAN
            } else {
                ge as f64 / reports.len() as f64
            },
        }
    }

    /// `(name, value)` pairs in a fixed order, as written to the CSV footer.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("rows_ok", self.rows_ok as f64),
            ("rows_failed", self.rows_failed as f64),
            ("median_alpha1_sq", self.median_alpha1_sq),
            ("median_p_reg2", self.median_p_reg2),
            ("median_p_reg1", self.median_p_reg1),
            ("median_alpha1_sq_est", self.median_alpha1_sq_est),
            ("median_p_reg2_est", self.median_p_reg2_est),
            ("median_p_reg1_est", self.median_p_reg1_est),
            ("mean_alpha1_sq", self.mean_alpha1_sq),
            ("mean_p_reg2", self.mean_p_reg2),
            ("mean_p_reg1", self.mean_p_reg1),
            ("mean_alpha1_sq_est", self.mean_alpha1_sq_est),
            ("mean_p_reg2_est", self.mean_p_reg2_est),
            ("mean_p_reg1_est", self.mean_p_reg1_est),
            ("median_abs_err_alpha1_sq", self.median_abs_err_alpha1_sq),
            ("median_abs_err_p_reg2", self.median_abs_err_p_reg2),
            ("median_abs_err_p_reg1", self.median_abs_err_p_reg1),
            ("rank_corr_p_reg1", self.rank_corr_p_reg1),
            ("frac_p_reg1_ge_alpha1_sq", self.frac_p_reg1_ge_alpha1_sq),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub rows: Vec<TrialRow>,
    pub aggregates: Aggregates,
}

impl ReportTable {
    pub fn from_rows(rows: Vec<TrialRow>) -> Self {
        let aggregates = Aggregates::from_rows(&rows);
        Self { rows, aggregates }
    }
}

fn worker_count(cfg: &ExperimentConfig) -> Option<usize> {
    cfg.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|n| *n > 0)
    })
}

fn engine_outcome(analysis: &Analysis, cfg: &ExperimentConfig) -> Result<EngineOutcome> {
    let qpe = QpeConfig::new(cfg.m).with_engine(cfg.engine);
    let summary = match cfg.engine {
        Engine::Spectral => spectral_summary(&analysis.spectrum, &analysis.alphas, &qpe)?,
        Engine::Dense => condition_on_zero(&run_dense_with_spectrum(&analysis.spectrum, &qpe)?)?,
    };
    Ok(EngineOutcome {
        p_zero: summary.p_zero,
        principal_mass: summary.principal_mass,
    })
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> TrialRow {
    let ens = &cfg.ensemble;
    let result = ens.generate(trial).and_then(|m| {
        let analysis = analyze(&m)?;
        let engine = if cfg.run_engines {
            Some(engine_outcome(&analysis, cfg)?)
        } else {
            None
        };
        Ok((analysis.report, engine))
    });
    let (outcome, engine) = match result {
        Ok((report, engine)) => (Ok(report), engine),
        Err(e) => {
            log::warn!("trial {trial} failed: {e}");
            (Err(e.to_string()), None)
        }
    };
    TrialRow {
        trial,
        order: ens.order,
        seed: ens.seed_for(trial),
        kind: ens.kind,
        outcome,
        engine,
    }
}

/// Runs every trial, in parallel, returning rows in trial order. Per-trial
/// failures are recorded in the row; only an invalid config is an error.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportTable> {
    cfg.validate()?;
    let trials = cfg.ensemble.trial_count;
    let work = || (0..trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Vec<_>>();
    let rows = match worker_count(cfg) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(ReportTable::from_rows(rows))
}

/// Runs the experiment and writes the configured CSV and SVG outputs.
pub fn run_and_emit(cfg: &ExperimentConfig) -> Result<ReportTable> {
    let table = run_experiment(cfg)?;
    if let Some(path) = &cfg.csv_path {
        crate::report::emit_csv(&table, path)?;
    }
    if let (Some(path), true) = (&cfg.svg_path, cfg.plot) {
        crate::plot::emit_plot(&table, path)?;
    }
    Ok(table)
}
