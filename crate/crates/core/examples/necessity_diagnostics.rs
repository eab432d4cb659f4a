//! Finite-n diagnostics for whether a coin can simulate a target: the Lévy
//! distance between self-informations and the shifted spectrum gap.

use specsim::source::{levy_distance, RealRvDist};
use specsim::spectrum::{build_spectrum, deficiency_measure, shifted_gap, Pmf};

fn main() -> specsim::Result<()> {
    let coin = Pmf::uniform(2)?;
    let target = Pmf::uniform(4)?;
    let u = RealRvDist::self_information(&coin)?;
    let v = RealRvDist::self_information(&target)?;
    println!("Lévy distance between self-informations: {:.4}", levy_distance(&u, &v));

    let (sx, sy) = (build_spectrum(&coin)?, build_spectrum(&target)?);
    for eps in [0.1, 0.25, 0.5] {
        let gap = shifted_gap(&sx, &sy, eps)?;
        println!(
            "eps {eps:<4} inf gap {:+.4}  measure(gap < -0.1) = {:.3}",
            gap.inf(),
            gap.measure_below(-0.1)
        );
    }
    for gamma in [-1.0, 0.0, 1.0] {
        println!("deficiency at gamma {gamma:+}: {:?}", deficiency_measure(&sy, &sx, gamma)?);
    }
    Ok(())
}
