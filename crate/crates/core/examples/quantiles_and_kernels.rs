//! Quantile functions, the composed `H = h ∘ F⁻¹`, and its moments,
//! including a moment that does not exist.

use lstat_lab::{compose_h, p_moment, DistributionModel, Kernel, RealFn};

fn main() -> lstat_lab::Result<()> {
    let laws = [
        DistributionModel::standard_uniform(),
        DistributionModel::exponential(2.0),
        DistributionModel::standard_normal(),
        DistributionModel::two_point(-1.0, 1.0, 0.3),
    ];
    for law in &laws {
        let q: Vec<String> = [0.0, 0.1, 0.3, 0.5, 0.975]
            .iter()
            .map(|&t| format!("{:+.6}", law.quantile(t).unwrap()))
            .collect();
        println!(
            "{:<12} F^-1 at 0, .1, .3, .5, .975: {}",
            law.id(),
            q.join(" ")
        );
    }

    let cases = [
        (Kernel::Identity, DistributionModel::exponential(1.0), 2.0),
        (Kernel::Square, DistributionModel::standard_normal(), 1.0),
        (Kernel::Exp, DistributionModel::exponential(2.0), 1.0),
        (Kernel::Exp, DistributionModel::exponential(2.0), 2.0),
        (
            Kernel::Cos { frequency: 3.0 },
            DistributionModel::standard_uniform(),
            2.0,
        ),
    ];
    for (kernel, law, p) in cases {
        let h = compose_h(&kernel, &law);
        let m = p_moment(&h, p, 1e-10)?;
        println!(
            "h = {:<9} F = {:<12} H(0.9) = {:>10.6}  E|h(X)|^{p} = {m:?}",
            kernel.id(),
            law.id(),
            h.eval(0.9)
        );
    }
    Ok(())
}
