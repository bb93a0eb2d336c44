//! Loads a JSON experiment config and prints the per-size summaries and
//! verdicts. Pass a path, or run one of `examples/configs/*.json`:
//!
//! ```text
//! cargo run --release --example experiment_config -- crates/core/examples/configs/markov_exponential.json
//! ```

use std::path::PathBuf;

use lstat_lab::harness::{run_experiment, write_csv};
use lstat_lab::ExperimentConfig;

fn main() -> lstat_lab::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("examples/configs/markov_exponential.json")
        });
    let config = ExperimentConfig::load(&path)?;
    let report = run_experiment(&config)?;

    println!(
        "conditions: cond_i = {}, cond_ii = {}",
        report.conditions.cond_i, report.conditions.cond_ii
    );
    println!(
        "mixing: {:?}, dyadic condition {:?}",
        report.mixing.phi_bound, report.mixing.condition4.verdict
    );
    for s in &report.summaries {
        println!(
            "n = {:>7}: median gap {:.3e}, p90 gap {:.3e}, median ks {:.4}",
            s.n, s.median_gap, s.p90_gap, s.median_ks
        );
    }
    for v in [&report.slln, &report.gc] {
        println!(
            "{} -> {}",
            v.rule,
            if v.consistent {
                "consistent"
            } else {
                "inconsistent"
            }
        );
    }
    let last = report.config.n_grid.last().copied().unwrap_or(0);
    let tail: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r.n == last)
        .take(3)
        .cloned()
        .collect();
    println!("\nfirst rows at n = {last}:");
    write_csv(&tail, std::io::stdout().lock())
}
