//! Triangular weights with `H(t) = t` over iid uniforms: `cₙ(t)` never
//! settles, yet `μₙ` and `Lₙ` both approach 1/4.

use lstat_lab::lstat::{l_statistic_integral, mu_n};
use lstat_lab::{
    compose_h, materialize, DistributionModel, EmpiricalQuantile, Kernel, Process,
    ProcessGenerator, WeightScheme,
};

fn main() -> lstat_lab::Result<()> {
    let h = compose_h(&Kernel::Identity, &DistributionModel::standard_uniform());
    let gen = ProcessGenerator::new(Process::IidUniform, 42);
    let path = gen.uniform_sample(1_000_000)?;

    println!(
        "{:>9} {:>12} {:>12} {:>12}",
        "n", "mu_n", "L_n", "|L_n - mu_n|"
    );
    for n in [100, 1_000, 10_000, 100_000, 1_000_000] {
        let w = materialize(&WeightScheme::TriangularExample, n)?;
        let mu = mu_n(&w, &h, 1e-10)?;
        let l = l_statistic_integral(&w, &h, &EmpiricalQuantile::new(path[..n].to_vec())?)?;
        println!("{n:>9} {mu:>12.8} {l:>12.8} {:>12.3e}", (l - mu).abs());
    }

    // The weight function itself keeps oscillating between 0 and ~1.
    let w = materialize(&WeightScheme::TriangularExample, 10_000)?;
    let probes: Vec<String> = [0.0, 0.005, 0.01, 0.015, 0.5]
        .iter()
        .map(|&t| format!("{:.3}", w.step_eval(t).unwrap()))
        .collect();
    println!(
        "c_n(t) at t = 0, .005, .01, .015, .5 (n = 10^4): {}",
        probes.join(", ")
    );
    Ok(())
}
