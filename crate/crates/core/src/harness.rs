//! Experiment configuration, replicated Monte Carlo sweeps, heuristic
//! convergence verdicts, and CSV/JSON reports.
//!
//! Each replication `r` draws one uniform-scale path of length `max(n_grid)`
//! from the stream keyed by `(base_seed, r)`; every `n` in the grid uses the
//! prefix of that path, so samples are nested across `n`. Rows are always
//! assembled in `(n, replication)` order regardless of thread count.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{compose_h, DistributionModel, Kernel, TransformedQuantile};
use crate::error::{Error, Result};
use crate::lstat::{self, DiscrepancyOptions, EmpiricalQuantile};
use crate::processes::{MixingProfile, Process, ProcessGenerator};
use crate::rng::derive_key;
use crate::weights::{
    check_conditions, materialize, weight_norm, ConditionReport, Exponent, WeightNorms,
    WeightScheme, WeightVector,
};

pub const THREADS_ENV: &str = "LSTAT_LAB_THREADS";
/// Allowed relative increase between consecutive median values.
pub const MONOTONE_SLACK: f64 = 1.10;
/// Grid entries inspected by the monotonicity part of a verdict.
pub const TREND_WINDOW: usize = 3;
pub const CSV_HEADER: [&str; 9] = [
    "n",
    "replication",
    "L_n",
    "mu_n",
    "gap",
    "ks",
    "sup7",
    "lp8",
    "holder_bound",
];

fn default_p() -> f64 {
    2.0
}

fn default_replications() -> usize {
    1
}

fn default_grid_per_cell() -> usize {
    lstat::DEFAULT_GRID_PER_CELL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionMode {
    /// `sup7` whenever `H` is continuous on `[0, 1]`.
    #[default]
    Auto,
    /// Always compute `sup7`.
    ConditionI,
    /// Never compute `sup7`.
    ConditionIi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub quadrature: f64,
    pub verdict_gap: f64,
    pub verdict_ks: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: crate::quadrature::DEFAULT_REL_TOL,
            verdict_gap: 0.01,
            verdict_ks: 0.02,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub process: Process,
    pub distribution: DistributionModel,
    pub kernel: Kernel,
    pub weights: WeightScheme,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub mode: ConditionMode,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_grid_per_cell")]
    pub grid_per_cell: usize,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::config("n_grid must be non-empty"));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::config("n_grid entries must be ≥ 1"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("n_grid must be strictly increasing"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be ≥ 1"));
        }
        if !(1.0..f64::INFINITY).contains(&self.p) {
            return Err(Error::config(format!(
                "p = {} must be finite and ≥ 1",
                self.p
            )));
        }
        if self.grid_per_cell < 2 {
            return Err(Error::config("grid_per_cell must be ≥ 2"));
        }
        self.distribution.validate()?;
        self.process.validate()
    }

    pub fn transformed_quantile(&self) -> TransformedQuantile {
        compose_h(&self.kernel, &self.distribution)
    }

    fn computes_sup(&self, h: &TransformedQuantile) -> bool {
        match self.mode {
            ConditionMode::Auto => h.is_continuous(),
            ConditionMode::ConditionI => true,
            ConditionMode::ConditionIi => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub n: usize,
    pub replication: usize,
    pub l_n: f64,
    pub mu_n: f64,
    pub gap: f64,
    pub ks: f64,
    pub sup7: Option<f64>,
    pub lp8: f64,
    pub holder_bound: f64,
    /// `Cₙ(1) · sup7`, the bound on the gap under condition (i).
    pub sup_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub replications: usize,
    pub median_gap: f64,
    pub p90_gap: f64,
    pub median_ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub consistent: bool,
    pub rule: String,
    pub tol: f64,
    pub medians: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub conditions: ConditionReport,
    pub mixing: MixingProfile,
    pub rows: Vec<ReplicationRow>,
    pub summaries: Vec<SizeSummary>,
    pub slln: Verdict,
    pub gc: Verdict,
    pub notes: Vec<String>,
}

/// Execution knobs that do not change results.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` reads `LSTAT_LAB_THREADS`, falling back to all cores.
    pub threads: Option<usize>,
    /// Directory for per-cell CSV dumps of replication 0.
    pub debug_dump: Option<PathBuf>,
}

pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads.or_else(threads_from_env) {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(job))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    run_experiment_with(config, &RunOptions::default())
}

struct SizePlan {
    n: usize,
    w: WeightVector,
    mu: f64,
    norms: WeightNorms,
    c1: f64,
}

pub fn run_experiment_with(
    config: &ExperimentConfig,
    opts: &RunOptions,
) -> Result<ConvergenceReport> {
    config.validate()?;
    let h = config.transformed_quantile();
    let conditions = check_conditions(&h, &config.weights, config.p, &config.n_grid)?;
    let mixing = config.process.mixing_profile()?;
    let q = Exponent::conjugate_of(config.p)?;
    let tol = config.tolerances.quadrature;

    let plans = config
        .n_grid
        .iter()
        .map(|&n| {
            let w = materialize(&config.weights, n)?;
            let mu = lstat::mu_n(&w, &h, tol).map_err(|e| match e {
                Error::Diverges(msg) => Error::Diverges(format!(
                    "{msg}; condition report: cond_i={}, cond_ii={}, warnings={:?}",
                    conditions.cond_i, conditions.cond_ii, conditions.warnings
                )),
                e => e,
            })?;
            let norms = weight_norm(&w, q)?;
            let c1 = weight_norm(&w, Exponent::Finite(1.0))?.value;
            Ok(SizePlan {
                n,
                w,
                mu,
                norms,
                c1,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let with_sup = config.computes_sup(&h);
    let dopts = DiscrepancyOptions {
        p: config.p,
        tol,
        grid_per_cell: config.grid_per_cell,
        with_sup,
    };
    let n_max = *config.n_grid.last().expect("validated non-empty");

    let per_rep: Vec<Result<Vec<ReplicationRow>>> = with_pool(opts.threads, || {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let path = replication_path(config, r, n_max)?;
                plans
                    .iter()
                    .map(|plan| {
                        let d = lstat::discrepancy_report(
                            &plan.w,
                            &h,
                            path[..plan.n].to_vec(),
                            plan.mu,
                            &plan.norms,
                            dopts,
                        )?;
                        Ok(ReplicationRow {
                            n: plan.n,
                            replication: r,
                            l_n: d.l_n,
                            mu_n: d.mu_n,
                            gap: d.gap,
                            ks: d.ks,
                            sup7: d.sup7,
                            lp8: d.lp8,
                            holder_bound: d.holder_bound,
                            sup_bound: d.sup7.map(|s| plan.c1 * s),
                        })
                    })
                    .collect()
            })
            .collect()
    })?;
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(plans.len() * config.replications);
    for k in 0..plans.len() {
        for rep in &per_rep {
            rows.push(rep[k].clone());
        }
    }

    if let Some(dir) = &opts.debug_dump {
        dump_cells(dir, config, &h, &plans, n_max)?;
    }

    let summaries = summarize(&rows);
    let slln = verify_slln_summaries(&summaries, config.tolerances.verdict_gap);
    let gc = verify_gc_summaries(&summaries, config.tolerances.verdict_ks);
    let mut notes = vec![
        "verdicts are heuristic: almost-sure convergence carries no rate".to_string(),
        format!(
            "replication r uses the counter stream keyed by (base_seed = {}, r)",
            config.base_seed
        ),
    ];
    notes.extend(mixing.notes.iter().cloned());
    Ok(ConvergenceReport {
        config: config.clone(),
        conditions,
        mixing,
        rows,
        summaries,
        slln,
        gc,
        notes,
    })
}

fn replication_path(config: &ExperimentConfig, r: usize, n: usize) -> Result<Vec<f64>> {
    ProcessGenerator::new(
        config.process.clone(),
        derive_key(config.base_seed, r as u64, 0),
    )
    .uniform_sample(n)
}

fn dump_cells(
    dir: &Path,
    config: &ExperimentConfig,
    h: &TransformedQuantile,
    plans: &[SizePlan],
    n_max: usize,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = replication_path(config, 0, n_max)?;
    let tol = config.tolerances.quadrature;
    for plan in plans {
        let file = dir.join(format!("cells_n{}_rep0.csv", plan.n));
        let g = EmpiricalQuantile::new(path[..plan.n].to_vec())?;
        let cell_h = lstat::cell_h_integrals(h, plan.n, tol)?;
        let cell_lp = lstat::cell_lp_integrals(h, &g, config.p, tol)
            .unwrap_or_else(|_| vec![f64::INFINITY; plan.n]);
        let mut out = csv::Writer::from_path(&file)?;
        out.write_record(["i", "u_sorted", "x_sorted", "c", "cell_int_H", "cell_lp"])?;
        for (i, &u) in g.base().sorted().iter().enumerate() {
            out.write_record([
                (i + 1).to_string(),
                fmt_f64(u),
                fmt_f64(config.distribution.quantile_unchecked(u)),
                fmt_f64(plan.w.as_slice()[i]),
                fmt_f64(cell_h[i]),
                fmt_f64(cell_lp[i]),
            ])?;
        }
        out.flush().map_err(|e| Error::io(&file, e))?;
    }
    Ok(())
}

/// Linear-interpolation quantile of `values` (sorted internally).
pub fn quantile_of(values: &[f64], level: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = level.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if v[lo] == v[hi] {
        v[lo]
    } else {
        v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
    }
}

pub fn median(values: &[f64]) -> f64 {
    quantile_of(values, 0.5)
}

/// Per-`n` medians over whatever replications are present.
pub fn summarize(rows: &[ReplicationRow]) -> Vec<SizeSummary> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let gaps: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.gap).collect();
            let ks: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.ks).collect();
            SizeSummary {
                n,
                replications: gaps.len(),
                median_gap: median(&gaps),
                p90_gap: quantile_of(&gaps, 0.9),
                median_ks: median(&ks),
            }
        })
        .collect()
}

/// The shared verdict rule: the last median is below `tol`, and across the
/// last three grid sizes each median is at most 1.1 times its predecessor.
pub fn trend_verdict(label: &str, medians: &[f64], tol: f64) -> Verdict {
    let window = &medians[medians.len().saturating_sub(TREND_WINDOW)..];
    let below = medians.last().is_some_and(|&m| m < tol);
    let monotone = window.windows(2).all(|w| w[1] <= MONOTONE_SLACK * w[0]);
    let mut rule = format!(
        "{label}: median at the largest n < {tol} AND median[k+1] <= {MONOTONE_SLACK} * median[k] over the last {TREND_WINDOW} grid sizes"
    );
    if medians.len() < TREND_WINDOW {
        rule.push_str(&format!(
            " (only {} grid sizes available; trend checked on those)",
            medians.len()
        ));
    }
    Verdict {
        consistent: below && monotone,
        rule,
        tol,
        medians: medians.to_vec(),
    }
}

fn verify_slln_summaries(s: &[SizeSummary], tol: f64) -> Verdict {
    let m: Vec<f64> = s.iter().map(|x| x.median_gap).collect();
    trend_verdict("slln_consistent (median |L_n - mu_n|)", &m, tol)
}

fn verify_gc_summaries(s: &[SizeSummary], tol: f64) -> Verdict {
    let m: Vec<f64> = s.iter().map(|x| x.median_ks).collect();
    trend_verdict("gc_consistent (median KS)", &m, tol)
}

pub fn verify_slln(report: &ConvergenceReport, tol: f64) -> Verdict {
    verify_slln_summaries(&report.summaries, tol)
}

pub fn verify_gc(report: &ConvergenceReport, tol: f64) -> Verdict {
    verify_gc_summaries(&report.summaries, tol)
}

/// 17 significant digits, so that values parse back bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ReplicationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.replication.to_string(),
            fmt_f64(r.l_n),
            fmt_f64(r.mu_n),
            fmt_f64(r.gap),
            fmt_f64(r.ks),
            r.sup7.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.lp8),
            fmt_f64(r.holder_bound),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn csv_bytes(rows: &[ReplicationRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(buf)
}

/// Parses a CSV produced by [`write_csv`]. `sup_bound` is not part of the
/// CSV and comes back as `None`.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ReplicationRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::config(format!("unexpected CSV header {header:?}")));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::config(format!("bad number {s:?}")))
    };
    let int = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::config(format!("bad integer {s:?}")))
    };
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(ReplicationRow {
                n: int(&rec[0])?,
                replication: int(&rec[1])?,
                l_n: num(&rec[2])?,
                mu_n: num(&rec[3])?,
                gap: num(&rec[4])?,
                ks: num(&rec[5])?,
                sup7: if rec[6].is_empty() {
                    None
                } else {
                    Some(num(&rec[6])?)
                },
                lp8: num(&rec[7])?,
                holder_bound: num(&rec[8])?,
                sup_bound: None,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn emit(report: &ConvergenceReport, format: Format, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(&report.rows, &mut out)?,
        Format::Json => serde_json::to_writer_pretty(&mut out, report)?,
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsRow {
    pub n: usize,
    pub replication: usize,
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcReport {
    pub rows: Vec<KsRow>,
    pub medians: Vec<(usize, f64)>,
    pub verdict: Verdict,
}

/// KS-only sweep over `n_grid`.
pub fn run_gc_sweep(config: &ExperimentConfig, threads: Option<usize>) -> Result<GcReport> {
    config.validate()?;
    let n_max = *config.n_grid.last().expect("validated non-empty");
    let per_rep: Vec<Result<Vec<KsRow>>> = with_pool(threads, || {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let path = replication_path(config, r, n_max)?;
                let x: Vec<f64> = path
                    .iter()
                    .map(|&u| config.distribution.quantile_unchecked(u))
                    .collect();
                config
                    .n_grid
                    .iter()
                    .map(|&n| {
                        Ok(KsRow {
                            n,
                            replication: r,
                            ks: lstat::ks_statistic(&x[..n], &config.distribution)?,
                        })
                    })
                    .collect()
            })
            .collect()
    })?;
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for (k, &n) in config.n_grid.iter().enumerate() {
        let ks: Vec<f64> = per_rep.iter().map(|rep| rep[k].ks).collect();
        medians.push((n, median(&ks)));
        rows.extend(per_rep.iter().map(|rep| rep[k].clone()));
    }
    let m: Vec<f64> = medians.iter().map(|&(_, v)| v).collect();
    let verdict = trend_verdict(
        "gc_consistent (median KS)",
        &m,
        config.tolerances.verdict_ks,
    );
    Ok(GcReport {
        rows,
        medians,
        verdict,
    })
}
