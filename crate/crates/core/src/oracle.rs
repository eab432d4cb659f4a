//! Naive reference computations used to validate the analytic code: a
//! midpoint Riemann sum for sub-level measures, exhaustive search over
//! deterministic maps, and seeded Monte-Carlo sampling of a pushforward.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::source::DeterministicMap;
use crate::spectrum::{Pmf, Spectrum};

/// Generator behind every seeded oracle; recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub grid_size: u64,
    pub mc_samples: u64,
    pub rng_seed: u64,
    pub max_enum_maps: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_size: 100_000,
            mc_samples: 100_000,
            rng_seed: 0,
            max_enum_maps: 1_000_000,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 10 {
            return Err(Error::Precondition(format!("grid size {} must be ≥ 10", self.grid_size)));
        }
        if self.mc_samples < 1 {
            return Err(Error::Precondition("at least one Monte-Carlo sample is needed".into()));
        }
        Ok(())
    }
}

/// Reads a spectrum at increasing points by walking its breakpoints.
struct Walker<'a> {
    ends: &'a [f64],
    values: &'a [f64],
    k: usize,
}

impl<'a> Walker<'a> {
    fn new(s: &'a Spectrum) -> Self {
        Self {
            ends: s.breakpoints(),
            values: s.values(),
            k: 0,
        }
    }

    fn at(&mut self, delta: f64) -> f64 {
        while self.k + 1 < self.ends.len() && self.ends[self.k] <= delta {
            self.k += 1;
        }
        self.values[self.k]
    }
}

/// Midpoint estimate of `μ{δ ∈ [0, 1−shift) : c^x(δ+shift) − c^y(δ) < threshold}`
/// on `grid` equal cells. The error is at most `2·(breakpoints of x and y)/grid`.
pub fn grid_measure(sx: &Spectrum, sy: &Spectrum, threshold: f64, shift: f64, grid: u64) -> Result<f64> {
    if !(sx.is_full() && sy.is_full()) {
        return Err(Error::Truncated("grid oracle needs spectra covering [0, 1)".into()));
    }
    if !(0.0..1.0).contains(&shift) {
        return Err(Error::Domain(format!("shift {shift} must lie in [0, 1)")));
    }
    if grid == 0 {
        return Err(Error::Precondition("grid size must be positive".into()));
    }
    let len = 1.0 - shift;
    let cell = len / grid as f64;
    let (mut wx, mut wy) = (Walker::new(sx), Walker::new(sy));
    let mut hits = 0u64;
    for i in 0..grid {
        let d = (i as f64 + 0.5) * cell;
        if wx.at(d + shift) - wy.at(d) < threshold {
            hits += 1;
        }
    }
    Ok(hits as f64 * cell)
}

/// Exhaustive minimum of `d(target, φ_*(coin))` over every map from the coin
/// support into the target support. Returns the first minimizer found.
pub fn brute_force_optimal_map(coin: &Pmf, target: &Pmf, cap: u64) -> Result<(DeterministicMap, f64)> {
    if coin.tail_mass() > 0.0 || target.tail_mass() > 0.0 {
        return Err(Error::Truncated("enumeration needs fully listed pmfs".into()));
    }
    let xs: Vec<usize> = (0..coin.len()).filter(|&i| coin.probs()[i] > 0.0).collect();
    let ys: Vec<usize> = (0..target.len()).filter(|&j| target.probs()[j] > 0.0).collect();
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Degenerate("coin and target need positive-probability symbols".into()));
    }
    let required = (ys.len() as f64).powi(xs.len() as i32);
    if required > cap as f64 {
        return Err(Error::EnumerationRefused { required, cap });
    }

    // Same accumulation order as pushforward followed by variational_distance,
    // so the minimum is bit-comparable with distances of constructed maps.
    let distance = |assignment: &[usize]| {
        let mut mass = vec![0.0; target.len()];
        for (i, &j) in assignment.iter().enumerate() {
            mass[j] += coin.probs()[i];
        }
        let mut acc = KahanSum::new();
        for (j, &t) in target.probs().iter().enumerate() {
            acc.add((t - mass[j]).abs());
        }
        acc.value()
    };

    let mut digits = vec![0usize; xs.len()];
    let mut assignment = vec![ys[0]; coin.len()];
    let mut best = (assignment.clone(), distance(&assignment));
    loop {
        // odometer increment over the support positions
        let mut pos = 0;
        while pos < digits.len() {
            digits[pos] += 1;
            if digits[pos] < ys.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        if pos == digits.len() {
            break;
        }
        for (k, &i) in xs.iter().enumerate() {
            assignment[i] = ys[digits[k]];
        }
        let d = distance(&assignment);
        if d < best.1 {
            best = (assignment.clone(), d);
        }
    }
    let map = DeterministicMap::new(coin.labels().to_vec(), target.labels().to_vec(), best.0)?;
    Ok((map, best.1))
}

/// Variational distance between `target` and the empirical law of `φ(X)`
/// over `samples` draws of `X ~ coin`.
pub fn mc_empirical_distance(
    coin: &Pmf,
    map: &DeterministicMap,
    target: &Pmf,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    if coin.tail_mass() > 0.0 {
        return Err(Error::Truncated("sampling needs a fully listed coin".into()));
    }
    let images: Vec<usize> = coin
        .labels()
        .iter()
        .zip(coin.probs())
        .map(|(l, &p)| match map.image(l) {
            Some(y) => Ok(map.codomain().iter().position(|c| c == y).unwrap()),
            None if p > 0.0 => Err(Error::UnknownSymbol(l.clone())),
            None => Ok(usize::MAX),
        })
        .collect::<Result<_>>()?;
    let sampler = WeightedIndex::new(coin.probs())
        .map_err(|e| Error::InvalidPmf(format!("cannot sample coin: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; map.codomain().len()];
    for _ in 0..samples {
        counts[images[sampler.sample(&mut rng)]] += 1;
    }
    let n = samples as f64;
    let mut acc = KahanSum::new();
    for (label, q) in target.iter() {
        let f = map
            .codomain()
            .iter()
            .position(|c| c == label)
            .map_or(0.0, |j| counts[j] as f64 / n);
        acc.add((q - f).abs());
    }
    for (j, c) in map.codomain().iter().enumerate() {
        if target.index_of(c).is_none() {
            acc.add(counts[j] as f64 / n);
        }
    }
    Ok(acc.value())
}

/// `config` with the generator identifier attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    #[serde(flatten)]
    pub config: OracleConfig,
    pub rng: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub oracle: String,
    pub value: f64,
    pub exact: Option<f64>,
    pub abs_err: Option<f64>,
    pub config: ReportConfig,
}

impl OracleReport {
    pub fn new(oracle: &str, value: f64, exact: Option<f64>, config: OracleConfig) -> Self {
        Self {
            oracle: oracle.to_string(),
            value,
            exact,
            abs_err: exact.map(|e| (value - e).abs()),
            config: ReportConfig {
                config,
                rng: RNG_ALGORITHM,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{build_mapping, pushforward, variational_distance};
    use crate::spectrum::{build_spectrum, deficiency_measure, shifted_gap};

    fn five_symbol() -> Pmf {
        Pmf::from_pairs([("z1", 0.025), ("z2", 0.075), ("z3", 0.2), ("z4", 0.3), ("z5", 0.4)]).unwrap()
    }

    #[test]
    fn grid_constant_gap_is_exact() {
        let a = build_spectrum(&Pmf::uniform(2).unwrap()).unwrap();
        let b = build_spectrum(&Pmf::uniform(4).unwrap()).unwrap();
        assert_eq!(grid_measure(&a, &b, 0.0, 0.0, 37).unwrap(), 1.0);
        assert_eq!(grid_measure(&a, &b, -1.0, 0.0, 37).unwrap(), 0.0);
        let m = grid_measure(&a, &b, -0.1, 0.25, 40).unwrap();
        assert!((m - 0.75).abs() < 1e-12);
    }

    #[test]
    fn grid_matches_fig1_values() {
        let x = build_spectrum(&five_symbol()).unwrap();
        let y = build_spectrum(&Pmf::uniform(2).unwrap()).unwrap();
        for (g, want) in [(0.0, 0.0), (0.3, 0.4), (0.6, 0.7), (1.0, 0.9), (2.0, 0.975), (3.1, 1.0)] {
            let m = grid_measure(&x, &y, g, 0.0, 1_000_000).unwrap();
            assert!((m - want).abs() < 1e-5, "γ = {g}: {m}");
            let exact = deficiency_measure(&x, &y, g).unwrap().exact().unwrap();
            assert!((exact - want).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_shifted_matches_step_difference() {
        let x = build_spectrum(&five_symbol()).unwrap();
        let y = build_spectrum(&Pmf::from_pairs([("a", 0.6), ("b", 0.3), ("c", 0.1)]).unwrap()).unwrap();
        let g = 100_000;
        for eps in [0.05, 0.3, 0.7] {
            let exact = shifted_gap(&x, &y, eps).unwrap().measure_below(-0.2);
            let est = grid_measure(&x, &y, -0.2, eps, g).unwrap();
            assert!((exact - est).abs() <= 2.0 * 8.0 / g as f64);
        }
    }

    #[test]
    fn brute_force_cases() {
        let u4 = Pmf::uniform(4).unwrap();
        let u2 = Pmf::uniform(2).unwrap();
        let (_, d) = brute_force_optimal_map(&u4, &u2, 16).unwrap();
        assert_eq!(d, 0.0);
        let (m, d) = brute_force_optimal_map(&Pmf::point_mass("z"), &u2, 16).unwrap();
        assert_eq!(d, 1.0);
        assert_eq!(m.domain().len(), 1);
        let p = five_symbol();
        let (_, d) = brute_force_optimal_map(&p, &p, 1 << 20).unwrap();
        assert_eq!(d, 0.0);
        assert!(matches!(
            brute_force_optimal_map(&u4, &u2, 15),
            Err(Error::EnumerationRefused { required, cap: 15 }) if required == 16.0
        ));
    }

    #[test]
    fn brute_force_agrees_with_library_distance() {
        let coin = five_symbol();
        let target = Pmf::from_pairs([("u", 0.55), ("v", 0.3), ("w", 0.15)]).unwrap();
        let (m, d) = brute_force_optimal_map(&coin, &target, 1000).unwrap();
        let lib = variational_distance(&target, &pushforward(&m, &coin).unwrap()).unwrap();
        assert_eq!(d, lib);
        let built = build_mapping(&coin, &target, 0.3, 1.3).unwrap();
        let dp = variational_distance(&target, &pushforward(&built, &coin).unwrap()).unwrap();
        assert!(d <= dp);
    }

    #[test]
    fn monte_carlo_cases() {
        let coin = five_symbol();
        let id = DeterministicMap::identity(&coin);
        let d = mc_empirical_distance(&coin, &id, &coin, 1_000_000, 7).unwrap();
        assert!(d <= 0.01, "{d}");
        let again = mc_empirical_distance(&coin, &id, &coin, 1_000_000, 7).unwrap();
        assert_eq!(d, again);
        assert!(mc_empirical_distance(&coin, &id, &coin, 0, 7).is_err());

        // everything onto `u`: analytic distance 2·(1 − 0.6) = 0.8
        let target = Pmf::from_pairs([("u", 0.6), ("v", 0.4)]).unwrap();
        let to_u = DeterministicMap::from_pairs(
            coin.labels().iter().map(|l| (l.clone(), "u".to_string())),
            vec!["u".into(), "v".into()],
        )
        .unwrap();
        let est = mc_empirical_distance(&coin, &to_u, &target, 1000, 1).unwrap();
        assert!((est - 0.8).abs() < 1e-12);
    }

    #[test]
    fn config_and_report() {
        assert!(OracleConfig::default().validate().is_ok());
        let bad = OracleConfig {
            grid_size: 5,
            ..OracleConfig::default()
        };
        assert!(bad.validate().is_err());
        let r = OracleReport::new("grid_measure", 0.5, Some(0.4), OracleConfig::default());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["config"]["rng"], RNG_ALGORITHM);
        assert_eq!(json["config"]["grid_size"], 100_000);
        assert!((json["abs_err"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    }
}
