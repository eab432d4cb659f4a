//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specsim::source::DeterministicMap;
use specsim::spectrum::Pmf;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A pmf on `n` symbols. Weights are drawn from one of three shapes: flat
/// uniform, small integers (so ties occur), or log-normal (skewed).
pub fn random_pmf<R: Rng>(rng: &mut R, n: usize, prefix: &str) -> Pmf {
    let shape = rng.gen_range(0..3);
    let w: Vec<f64> = (0..n)
        .map(|_| match shape {
            0 => rng.gen_range(0.01..1.0),
            1 => rng.gen_range(1..=4) as f64,
            _ => rng.gen_range(-3.0f64..3.0).exp(),
        })
        .collect();
    let total: f64 = w.iter().sum();
    Pmf::new(labels(prefix, n), w.iter().map(|x| x / total).collect()).expect("normalized weights")
}

/// A pmf whose probabilities are multiples of `2^-20`, so every partial sum
/// is exact in binary floating point.
pub fn dyadic_pmf<R: Rng>(rng: &mut R, n: usize, prefix: &str) -> Pmf {
    const SCALE: u32 = 1 << 20;
    let mut cuts: Vec<u32> = index::sample(rng, SCALE as usize - 1, n - 1)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut probs = Vec::with_capacity(n);
    for c in cuts.into_iter().chain(std::iter::once(SCALE)) {
        probs.push((c - prev) as f64 / SCALE as f64);
        prev = c;
    }
    Pmf::new(labels(prefix, n), probs).expect("dyadic masses sum to one")
}

/// Sends every symbol of `p` to a uniformly chosen label among `m` outputs.
pub fn random_map<R: Rng>(rng: &mut R, p: &Pmf, m: usize) -> DeterministicMap {
    let codomain = labels("y", m);
    let assignment = (0..p.len()).map(|_| rng.gen_range(0..m)).collect();
    DeterministicMap::new(p.labels().to_vec(), codomain, assignment).expect("valid map")
}
