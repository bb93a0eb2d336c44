//! Everything that controls one realized gap `|Lₙ − μₙ|`: KS, the uniform and
//! `Lₚ` distances between `H ∘ Gₙ⁻¹` and `H`, and the Hölder bounds.

use lstat_lab::lstat::{discrepancy_report, mu_n, quantile_sup_identity, DiscrepancyOptions};
use lstat_lab::weights::{weight_norm, WeightFunction};
use lstat_lab::{
    compose_h, materialize, DistributionModel, EmpiricalQuantile, Exponent, Kernel, Process,
    ProcessGenerator, WeightScheme,
};

fn main() -> lstat_lab::Result<()> {
    let h = compose_h(&Kernel::Square, &DistributionModel::standard_normal());
    let scheme = WeightScheme::Regular {
        j: WeightFunction::Trimmed {
            alpha: 0.05,
            beta: 0.05,
        },
    };
    let gen = ProcessGenerator::new(Process::MDependent { m: 2 }, 9);
    for n in [100, 1_000, 10_000] {
        let u = gen.uniform_sample(n)?;
        let w = materialize(&scheme, n)?;
        let mu = mu_n(&w, &h, 1e-10)?;
        let id = quantile_sup_identity(&EmpiricalQuantile::new(u.clone())?);
        for p in [1.0, 2.0] {
            let norms = weight_norm(&w, Exponent::conjugate_of(p)?)?;
            let opts = DiscrepancyOptions {
                p,
                tol: 1e-10,
                grid_per_cell: 8,
                with_sup: h.is_continuous(),
            };
            let d = discrepancy_report(&w, &h, u.clone(), mu, &norms, opts)?;
            println!(
                "n = {n:>6} p = {p}: gap {:.3e} <= bound {:.3e}; ks {:.4}, sup {}, lp {:.3e}",
                d.gap,
                d.holder_bound,
                d.ks,
                d.sup7.map_or("n/a".to_string(), |s| format!("{s:.4}")),
                d.lp8
            );
        }
        println!(
            "  sup|G^-1(t) - t| = {:.6}, sup|G(t) - t| = {:.6}",
            id.lhs, id.rhs
        );
    }
    Ok(())
}
