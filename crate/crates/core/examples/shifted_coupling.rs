//! Builds the shifted-uniform coupling of two pmfs and checks its marginals.

use specsim::source::shifted_coupling;
use specsim::spectrum::{build_spectrum, shifted_gap, Pmf};

fn main() -> specsim::Result<()> {
    let x = Pmf::from_pairs([("a", 0.5), ("b", 0.3), ("c", 0.2)])?;
    let y = Pmf::from_pairs([("u", 0.6), ("v", 0.4)])?;
    let eps = 0.1;
    let j = shifted_coupling(&x, &y, eps)?;
    for (a, b, p) in j.rows() {
        println!("P({a}, {b}) = {p:.4}");
    }
    println!("marginal error {:.1e}", j.marginal_error());
    let gap = shifted_gap(&build_spectrum(&x)?, &build_spectrum(&y)?, eps)?;
    for gamma in [0.0, 0.3, 1.0] {
        println!(
            "gamma {gamma}: P(log ratio < -gamma) = {:.4} <= {:.4}",
            j.log_ratio_below(-gamma),
            gap.measure_below(-gamma) + eps
        );
    }
    Ok(())
}
