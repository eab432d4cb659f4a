//! Source simulation: the interval-alignment mapping, variational distance,
//! and the necessity diagnostics (spectrum CDF dominance, Lévy distance and
//! the cyclically shifted coupling).

mod coupling;
mod levy;
mod mapping;

pub use coupling::{shifted_coupling, JointPmf};
pub use levy::{levy_distance, RealRvDist};
pub use mapping::{
    build_mapping, check_distance_bound, pushforward, simulate_source, DeterministicMap, MappingMeta,
    BoundReport, BOUND_SLACK,
};

use crate::error::{Error, Result};
use crate::numeric::{KahanSum, EQ_TOL};
use crate::spectrum::Pmf;

/// `Σ |p(a) − q(a)|` over the union of both label sets (no ½ factor, so the
/// result lies in `[0, 2]`).
pub fn variational_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.tail_mass() > 0.0 || q.tail_mass() > 0.0 {
        return Err(Error::Truncated(
            "variational distance is undefined with unlisted tail mass".into(),
        ));
    }
    let mut acc = KahanSum::new();
    for (label, pa) in p.iter() {
        acc.add((pa - q.prob(label)).abs());
    }
    for (label, qa) in q.iter() {
        if p.index_of(label).is_none() {
            acc.add(qa);
        }
    }
    Ok(acc.value())
}

/// `Pr{log 1/p(X) < c}`: the mass of symbols with `p(x) > e^{-c}`.
///
/// Self-information within [`EQ_TOL`] of `c` counts as equal, so decimal
/// inputs such as `p = 0.2, c = log 5` land on the non-strict side.
pub fn spectrum_cdf(p: &Pmf, c: f64) -> Result<f64> {
    if p.tail_mass() > 0.0 {
        return Err(Error::Truncated("spectrum CDF needs a fully listed pmf".into()));
    }
    Ok(p.probs()
        .iter()
        .zip(p.log_probs())
        .filter(|(_, lp)| -**lp < c - EQ_TOL)
        .map(|(pr, _)| *pr)
        .sum())
}
