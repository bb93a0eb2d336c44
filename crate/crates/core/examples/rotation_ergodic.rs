//! Irrational rotation: ergodic but not mixing. The dyadic mixing condition
//! fails, the pair frequencies never decorrelate, and `Lₙ − μₙ` still
//! vanishes.

use lstat_lab::harness::{run_experiment, verify_slln};
use lstat_lab::processes::golden_alpha;
use lstat_lab::{ExperimentConfig, Process, ProcessGenerator};

fn main() -> lstat_lab::Result<()> {
    let rotation = Process::Rotation {
        alpha: golden_alpha(),
        random_phase: true,
    };
    let profile = rotation.mixing_profile()?;
    println!(
        "phi bound {:?}, dyadic condition {:?}",
        profile.phi_bound, profile.condition4.verdict
    );

    let u = ProcessGenerator::new(rotation, 3).uniform_sample(100_000)?;
    for lag in [1, 2, 3, 5, 8, 13, 21, 34, 55, 89] {
        let pairs = u.len() - lag;
        let joint = (0..pairs)
            .filter(|&i| u[i] <= 0.5 && u[i + lag] <= 0.5)
            .count() as f64
            / pairs as f64;
        println!("lag {lag:>3}: P(U_i <= 1/2, U_i+lag <= 1/2) = {joint:.4} (independent: 0.25)");
    }

    let config = ExperimentConfig::from_json_str(
        r#"{
        "process": {"name": "rotation"},
        "distribution": {"name": "exponential"},
        "kernel": {"name": "identity"},
        "weights": {"scheme": "regular", "J": {"name": "linear", "intercept": 0.0, "slope": 2.0}},
        "n_grid": [1000, 10000, 100000],
        "replications": 8
    }"#,
    )?;
    let report = run_experiment(&config)?;
    for s in &report.summaries {
        println!("n = {:>6}: median gap {:.3e}", s.n, s.median_gap);
    }
    let v = verify_slln(&report, 0.01);
    println!("{} -> {}", v.rule, v.consistent);
    Ok(())
}
