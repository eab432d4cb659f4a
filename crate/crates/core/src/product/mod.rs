//! Weight-class spectra of i.i.d. Bernoulli sources over `{0,1}^n` and of
//! their two-component mixtures. Every sequence of Hamming weight `k` has the
//! same probability, so a spectrum has at most `n + 1` levels and `n` can run
//! into the thousands.

mod suite;

pub use suite::{
    example_suite, example3_instance, independent_surrogate, ExampleParams, ExampleReport,
    VERDICT_INCONCLUSIVE, VERDICT_NECESSITY_VIOLATED, VERDICT_SUFFICIENT_TREND, VERDICT_SURROGATE_SPLIT,
};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, log_add_exp};
use crate::spectrum::{Pmf, Spectrum};

/// Largest `n` for which [`WeightClassPmf::to_pmf`] lists all `2^n` sequences.
pub const MAX_MATERIALIZE_N: u64 = 20;

const CLASS_MASS_TOL: f64 = 1e-9;

/// Binary entropy in nats, with `0 · log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("binary entropy needs p in [0, 1], got {p}")));
    }
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Standard deviation of the per-letter self-information of Bernoulli(p):
/// `σ²(p) = p(1−p)·log²((1−p)/p)`.
pub fn self_information_std(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    (p * (1.0 - p)).sqrt() * ((1.0 - p) / p).ln().abs()
}

/// Finite-n tolerance for `c(δ)/n` around its limit, over `δ ∈ [lo, hi]`:
/// `1.5 · (z·σ/√n + 2/n)` with `z` the largest standard normal quantile
/// magnitude on the range.
pub fn clt_margin(sigma: f64, n: u64, lo: f64, hi: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let z = normal.inverse_cdf(lo).abs().max(normal.inverse_cdf(hi).abs());
    let n = n as f64;
    1.5 * (z * sigma / n.sqrt() + 2.0 / n)
}

/// All sequences of Hamming weight `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightClass {
    pub k: u64,
    /// Natural log of the probability of one sequence in the class.
    pub log_prob: f64,
    /// `log C(n, k)`.
    pub log_count: f64,
    /// `exp(log_count + log_prob)`.
    pub mass: f64,
}

/// An exchangeable pmf over `{0,1}^n`, stored one record per weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightClassPmf {
    n: u64,
    classes: Vec<WeightClass>,
    degenerate: bool,
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("block length n must be ≥ 1".into()));
    }
    Ok(())
}

fn bernoulli_log_probs(p: f64, n: u64) -> Vec<f64> {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (0..=n)
        .map(|k| {
            // avoid 0 · (−inf) at the endpoints
            let ones = if k == 0 { 0.0 } else { k as f64 * lp };
            let zeros = if k == n { 0.0 } else { (n - k) as f64 * lq };
            ones + zeros
        })
        .collect()
}

impl WeightClassPmf {
    /// i.i.d. Bernoulli(p) over `{0,1}^n`. `p ∈ {0, 1}` yields a point mass
    /// flagged as degenerate.
    pub fn bernoulli(p: f64, n: u64) -> Result<Self> {
        check_n(n)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("Bernoulli parameter {p} is not in [0, 1]")));
        }
        let degenerate = p == 0.0 || p == 1.0;
        Self::from_log_probs(n, bernoulli_log_probs(p, n), degenerate)
    }

    /// `α·Bern(p1)^n + (1−α)·Bern(p2)^n`.
    pub fn mixture(p1: f64, p2: f64, alpha: f64, n: u64) -> Result<Self> {
        check_n(n)?;
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("{name} = {p} is not in (0, 1)")));
            }
        }
        if !(0.0..=0.5).contains(&alpha) {
            return Err(Error::Domain(format!("mixing weight {alpha} is not in [0, 1/2]")));
        }
        let (la, lb) = (alpha.ln(), (1.0 - alpha).ln());
        let log_probs = bernoulli_log_probs(p1, n)
            .into_iter()
            .zip(bernoulli_log_probs(p2, n))
            .map(|(a, b)| log_add_exp(la + a, lb + b))
            .collect();
        Self::from_log_probs(n, log_probs, false)
    }

    fn from_log_probs(n: u64, log_probs: Vec<f64>, degenerate: bool) -> Result<Self> {
        let classes: Vec<WeightClass> = log_probs
            .into_iter()
            .enumerate()
            .map(|(k, log_prob)| {
                let log_count = ln_binomial(n, k as u64);
                WeightClass {
                    k: k as u64,
                    log_prob,
                    log_count,
                    mass: (log_count + log_prob).exp(),
                }
            })
            .collect();
        let total = compensated_sum(classes.iter().map(|c| c.mass));
        if (total - 1.0).abs() > CLASS_MASS_TOL {
            return Err(Error::InvalidPmf(format!("weight classes carry mass {total}")));
        }
        Ok(Self {
            n,
            classes,
            degenerate,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn classes(&self) -> &[WeightClass] {
        &self.classes
    }

    /// True when the source is a point mass because `p ∈ {0, 1}`.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// One segment per weight class, ordered by self-information and then
    /// by weight. Classes of probability zero are left out.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let mut live: Vec<&WeightClass> = self
            .classes
            .iter()
            .filter(|c| c.log_prob > f64::NEG_INFINITY)
            .collect();
        live.sort_by(|a, b| b.log_prob.total_cmp(&a.log_prob).then(a.k.cmp(&b.k)));
        Spectrum::from_pieces(live.iter().map(|c| (-c.log_prob, c.log_count, c.mass)), 1.0)
    }

    /// Lists every sequence as a bit-string label. Refused above
    /// [`MAX_MATERIALIZE_N`].
    pub fn to_pmf(&self) -> Result<Pmf> {
        if self.n > MAX_MATERIALIZE_N {
            return Err(Error::EnumerationRefused {
                required: 2f64.powi(self.n as i32),
                cap: 1 << MAX_MATERIALIZE_N,
            });
        }
        let n = self.n as usize;
        let size = 1usize << n;
        let mut labels = Vec::with_capacity(size);
        let mut log_probs = Vec::with_capacity(size);
        for s in 0..size {
            labels.push(bit_label(s, n));
            log_probs.push(self.classes[s.count_ones() as usize].log_prob);
        }
        Pmf::from_log_probs(labels, log_probs, 0.0)
    }
}

/// `s` as an `n`-character string of `0`/`1`, most significant bit first.
pub fn bit_label(s: usize, n: usize) -> String {
    (0..n).rev().map(|b| if s >> b & 1 == 1 { '1' } else { '0' }).collect()
}

/// Spectrum of Bern(p)^n. A degenerate `p` gives the zero spectrum and logs a
/// warning.
pub fn bernoulli_power_spectrum(p: f64, n: u64) -> Result<Spectrum> {
    let w = WeightClassPmf::bernoulli(p, n)?;
    if w.is_degenerate() {
        log::warn!("Bernoulli parameter {p} is degenerate; spectrum is a point mass");
    }
    w.spectrum()
}

/// Spectrum of the mixture `α·Bern(p1)^n + (1−α)·Bern(p2)^n`.
pub fn mixture_spectrum(p1: f64, p2: f64, alpha: f64, n: u64) -> Result<Spectrum> {
    WeightClassPmf::mixture(p1, p2, alpha, n)?.spectrum()
}

/// Constant spectrum `log m` on `[0, 1)`.
pub fn uniform_spectrum(m: u64) -> Result<Spectrum> {
    if m == 0 {
        return Err(Error::Domain("uniform spectrum needs m ≥ 1".into()));
    }
    let m = m as f64;
    Spectrum::from_pieces([(m.ln(), m.ln(), 1.0)], 1.0)
}
