//! Cross-checks the exact computations with independent oracles: a midpoint
//! grid, exhaustive map search and Monte-Carlo sampling.

use specsim::oracle::{brute_force_optimal_map, grid_measure, mc_empirical_distance};
use specsim::source::{pushforward, simulate_source, variational_distance};
use specsim::spectrum::{build_spectrum, deficiency_measure, Pmf};

fn main() -> specsim::Result<()> {
    let coin = Pmf::from_pairs([("z1", 0.025), ("z2", 0.075), ("z3", 0.2), ("z4", 0.3), ("z5", 0.4)])?;
    let target = Pmf::from_pairs([("u", 0.5), ("v", 0.5)])?;

    let (sx, sy) = (build_spectrum(&coin)?, build_spectrum(&target)?);
    let exact = deficiency_measure(&sx, &sy, 0.6)?.exact().unwrap();
    let grid = grid_measure(&sx, &sy, 0.6, 0.0, 1_000_000)?;
    println!("deficiency at 0.6: exact {exact:.6}, grid {grid:.6}");

    let (map, rep) = simulate_source(&coin, &target, 0.3, 1.21)?;
    let (_, best) = brute_force_optimal_map(&coin, &target, 1 << 10)?;
    println!("distance: optimal {best:.4} <= constructed {:.4} <= bound {:.4}", rep.d, rep.bound);

    let analytic = variational_distance(&target, &pushforward(&map, &coin)?)?;
    let mc = mc_empirical_distance(&coin, &map, &target, 1_000_000, 42)?;
    println!("distance: analytic {analytic:.4}, sampled {mc:.4}");
    Ok(())
}
