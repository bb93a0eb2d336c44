//! Materializes weight schemes and prints `Cₙ(q)` together with the power
//! means `Cₙ(q)^{1/q}`, which increase with `q`.

use lstat_lab::weights::{check_conditions, weight_norm, WeightFunction};
use lstat_lab::{compose_h, materialize, DistributionModel, Exponent, Kernel, WeightScheme};

fn main() -> lstat_lab::Result<()> {
    let schemes = [
        ("triangular", WeightScheme::TriangularExample),
        (
            "trimmed 10%/10%",
            WeightScheme::Regular {
                j: WeightFunction::Trimmed {
                    alpha: 0.1,
                    beta: 0.1,
                },
            },
        ),
        (
            "linear 2t",
            WeightScheme::Regular {
                j: WeightFunction::Linear {
                    intercept: 0.0,
                    slope: 2.0,
                },
            },
        ),
    ];
    let qs = [
        Exponent::Finite(1.0),
        Exponent::Finite(2.0),
        Exponent::Finite(4.0),
        Exponent::Infinity,
    ];
    for (name, scheme) in &schemes {
        let w = materialize(scheme, 1000)?;
        print!("{name:<16}");
        for q in qs {
            let norm = weight_norm(&w, q)?;
            print!("  C({q}) = {:.4} (mean {:.4})", norm.value, norm.root());
        }
        println!();
    }

    let h = compose_h(&Kernel::Identity, &DistributionModel::exponential(1.0));
    let report = check_conditions(&h, &schemes[1].1, 2.0, &[100, 1000, 10_000])?;
    println!("\ntrimmed weights, exponential identity, p = 2:");
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializable")
    );
    Ok(())
}
