//! Median KS distance by sample size for each generator, all with an
//! exponential marginal.

use lstat_lab::harness::median;
use lstat_lab::lstat::ks_statistic;
use lstat_lab::rng::derive_key;
use lstat_lab::{DistributionModel, Process, ProcessGenerator, TransitionMatrix};

fn main() -> lstat_lab::Result<()> {
    let law = DistributionModel::exponential(1.0);
    let processes = [
        Process::IidUniform,
        Process::MDependent { m: 4 },
        Process::Markov {
            p: TransitionMatrix::two_state(0.3, 0.3)?,
        },
        Process::Rotation {
            alpha: lstat_lab::processes::golden_alpha(),
            random_phase: true,
        },
        Process::Constant { value: 0.5 },
    ];
    let sizes = [1_000, 10_000, 100_000];
    println!(
        "{:<14} {}",
        "process",
        sizes.map(|n| format!("{n:>10}")).join("")
    );
    for process in processes {
        let mut medians = Vec::new();
        for &n in &sizes {
            let ks: Vec<f64> = (0..15)
                .map(|r| {
                    let x = ProcessGenerator::new(process.clone(), derive_key(1, r, 0))
                        .generate(n, &law)?;
                    ks_statistic(&x, &law)
                })
                .collect::<lstat_lab::Result<_>>()?;
            medians.push(format!("{:>10.5}", median(&ks)));
        }
        println!("{:<14} {}", process.id(), medians.join(""));
    }
    Ok(())
}
