//! Stationary law, worst-state mixing profile, a geometric bound and the
//! dyadic mixing condition for a few transition matrices.

use lstat_lab::processes::{
    check_condition4, markov_geometric_bound, markov_phi_profile, stationary_distribution,
};
use lstat_lab::TransitionMatrix;

fn main() -> lstat_lab::Result<()> {
    let chains = [
        ("sticky a=b=0.3", TransitionMatrix::two_state(0.3, 0.3)?),
        ("asymmetric", TransitionMatrix::two_state(0.1, 0.4)?),
        (
            "three-state cycle",
            TransitionMatrix::new(vec![
                vec![0.1, 0.9, 0.0],
                vec![0.0, 0.1, 0.9],
                vec![0.9, 0.0, 0.1],
            ])?,
        ),
        ("periodic flip", TransitionMatrix::two_state(1.0, 1.0)?),
    ];
    for (name, p) in &chains {
        let pi = stationary_distribution(p)?;
        let phi = markov_phi_profile(p, 8)?;
        let bound = markov_geometric_bound(p)?;
        let c4 = check_condition4(&bound);
        println!("{name}: pi = {pi:.4?}");
        let phi: Vec<String> = phi.iter().map(|v| format!("{v:.3e}")).collect();
        println!("  phi_bar(1..8) = {}", phi.join(" "));
        println!(
            "  bound {bound:?} -> {:?}, series <= {:?}",
            c4.verdict, c4.partial_sum_bound
        );
    }
    Ok(())
}
