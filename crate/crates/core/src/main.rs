use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lstat_lab::harness::{self, ExperimentConfig, Format, RunOptions};
use lstat_lab::processes::{self, check_condition4, PhiBound, TransitionMatrix};
use lstat_lab::weights::{self, Exponent, WeightScheme};
use lstat_lab::{Error, Result};

/// L-statistic convergence lab.
#[derive(Debug, Parser)]
#[command(name = "lstat-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a replicated convergence experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Per-row CSV report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full JSON report.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Directory for per-cell dumps of replication 0.
        #[arg(long)]
        debug_dump: Option<PathBuf>,
    },
    /// Print the weight-condition and mixing reports as JSON.
    CheckConditions {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print a weight row and its norms as CSV (`kind,key,value`).
    Weights {
        /// `triangular_example`, or a full scheme as JSON.
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated exponents, `inf` allowed.
        #[arg(long, default_value = "1,2,inf")]
        q: String,
    },
    /// Print lag, φ̄(lag) and the cumulative dyadic mixing sum for a chain.
    MixingBound {
        #[arg(long = "P-file")]
        p_file: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_lag: usize,
    },
    /// KS-only sweep over the configured grid.
    Gc {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("lstat-lab: {e}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether the verdicts (if any) are consistent.
fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run {
            config,
            out,
            json,
            debug_dump,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = harness::run_experiment_with(
                &cfg,
                &RunOptions {
                    threads: None,
                    debug_dump,
                },
            )?;
            match out.or_else(|| cfg.output.csv.clone()) {
                Some(path) => harness::emit(&report, Format::Csv, path)?,
                None => harness::write_csv(&report.rows, std::io::stdout().lock())?,
            }
            if let Some(path) = json.or_else(|| cfg.output.json.clone()) {
                harness::emit(&report, Format::Json, path)?;
            }
            for v in [&report.slln, &report.gc] {
                eprintln!(
                    "{} -> {}",
                    v.rule,
                    if v.consistent {
                        "consistent"
                    } else {
                        "inconsistent"
                    }
                );
            }
            Ok(report.slln.consistent && report.gc.consistent)
        }
        Command::CheckConditions { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let h = cfg.transformed_quantile();
            let conditions = weights::check_conditions(&h, &cfg.weights, cfg.p, &cfg.n_grid)?;
            let mixing = cfg.process.mixing_profile()?;
            let doc = serde_json::json!({ "conditions": conditions, "mixing": mixing });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(true)
        }
        Command::Weights { scheme, n, q } => {
            let scheme: WeightScheme = if scheme.trim_start().starts_with('{') {
                serde_json::from_str(&scheme)?
            } else {
                serde_json::from_value(serde_json::json!({ "scheme": scheme }))?
            };
            let exponents = q
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<Exponent>>>()?;
            let w = weights::materialize(&scheme, n)?;
            let mut out = csv::Writer::from_writer(std::io::stdout().lock());
            out.write_record(["kind", "key", "value"])?;
            for (i, c) in w.as_slice().iter().enumerate() {
                out.write_record([
                    "weight".to_string(),
                    (i + 1).to_string(),
                    harness::fmt_f64(*c),
                ])?;
            }
            for e in exponents {
                let norm = weights::weight_norm(&w, e)?;
                out.write_record([
                    "norm".to_string(),
                    e.to_string(),
                    harness::fmt_f64(norm.value),
                ])?;
            }
            out.flush().map_err(|e| Error::Config(e.to_string()))?;
            Ok(true)
        }
        Command::MixingBound { p_file, max_lag } => {
            let text = std::fs::read_to_string(&p_file).map_err(|e| Error::Io {
                path: p_file.clone(),
                source: e,
            })?;
            let doc: serde_json::Value = serde_json::from_str(&text)?;
            let rows: Vec<Vec<f64>> = serde_json::from_value(doc.get("P").cloned().unwrap_or(doc))?;
            let p = TransitionMatrix::new(rows)?;
            let profile = processes::markov_phi_profile(&p, max_lag)?;
            let mut out = csv::Writer::from_writer(std::io::stdout().lock());
            out.write_record(["lag", "phi_bar", "cond4_partial_sum"])?;
            let mut partial = 0.0;
            for (i, &phi) in profile.iter().enumerate() {
                let lag = i + 1;
                if lag >= 2 && lag.is_power_of_two() {
                    partial += phi.sqrt();
                }
                out.write_record([
                    lag.to_string(),
                    harness::fmt_f64(phi),
                    harness::fmt_f64(partial),
                ])?;
            }
            out.flush().map_err(|e| Error::Config(e.to_string()))?;
            let bound = processes::markov_geometric_bound(&p)?;
            let c4 = check_condition4(&bound);
            eprintln!(
                "geometric bound {bound:?}; dyadic mixing condition: {:?}, series bound {:?}",
                c4.verdict, c4.partial_sum_bound
            );
            eprintln!("phi bounds assume a stationary start");
            Ok(!matches!(bound, PhiBound::Geometric { rho, .. } if rho >= 1.0))
        }
        Command::Gc { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = harness::run_gc_sweep(&cfg, None)?;
            let write = |w: &mut dyn std::io::Write| -> Result<()> {
                let mut c = csv::Writer::from_writer(w);
                c.write_record(["n", "replication", "ks"])?;
                for r in &report.rows {
                    c.write_record([
                        r.n.to_string(),
                        r.replication.to_string(),
                        harness::fmt_f64(r.ks),
                    ])?;
                }
                c.flush().map_err(|e| Error::Config(e.to_string()))
            };
            match out {
                Some(path) => {
                    let mut f = std::fs::File::create(&path).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    write(&mut f)?;
                }
                None => write(&mut std::io::stdout().lock())?,
            }
            eprintln!(
                "{} -> {}",
                report.verdict.rule,
                if report.verdict.consistent {
                    "consistent"
                } else {
                    "inconsistent"
                }
            );
            Ok(report.verdict.consistent)
        }
    }
}
