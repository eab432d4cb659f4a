use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Total-mass tolerance accepted by [`Pmf`] validation.
pub const MASS_TOL: f64 = 1e-12;

/// A finite, labeled probability mass function.
///
/// `tail_mass` records probability assigned to symbols that were not listed,
/// which is how a countable source is truncated to a finite list.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    labels: Vec<String>,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
    tail_mass: f64,
    index: HashMap<String, usize>,
}

/// Serialized shape of a [`Pmf`]: `{"labels":[..],"probs":[..],"tail_mass":0.0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmfRecord {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
    #[serde(default)]
    pub tail_mass: f64,
}

impl Pmf {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        Self::with_tail(labels, probs, 0.0)
    }

    pub fn with_tail(labels: Vec<String>, probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Self::build(labels, probs, log_probs, tail_mass)
    }

    /// Builds a pmf from natural-log probabilities, keeping the log values
    /// as given so that masses far below `f64::MIN_POSITIVE` keep their order.
    pub fn from_log_probs(labels: Vec<String>, log_probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if let Some(lp) = log_probs.iter().find(|lp| lp.is_nan() || **lp > 1e-12) {
            return Err(Error::InvalidPmf(format!("log-probability {lp} is not ≤ 0")));
        }
        let probs = log_probs.iter().map(|lp| lp.exp()).collect();
        Self::build(labels, probs, log_probs, tail_mass)
    }

    pub fn from_pairs<S: Into<String>, I: IntoIterator<Item = (S, f64)>>(pairs: I) -> Result<Self> {
        let (labels, probs): (Vec<String>, Vec<f64>) =
            pairs.into_iter().map(|(l, p)| (l.into(), p)).unzip();
        Self::new(labels, probs)
    }

    /// Uniform pmf over `m` symbols labeled `"0"`, `"1"`, ...
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("uniform pmf needs at least one symbol".into()));
        }
        let labels = (0..m).map(|i| i.to_string()).collect();
        let p = 1.0 / m as f64;
        let log_p = -(m as f64).ln();
        Self::build(labels, vec![p; m], vec![log_p; m], 0.0)
    }

    pub fn point_mass(label: impl Into<String>) -> Self {
        Self::new(vec![label.into()], vec![1.0]).expect("point mass is valid")
    }

    /// Both representations supplied by the caller, which must keep them consistent.
    pub(crate) fn from_parts(
        labels: Vec<String>,
        probs: Vec<f64>,
        log_probs: Vec<f64>,
        tail_mass: f64,
    ) -> Result<Self> {
        Self::build(labels, probs, log_probs, tail_mass)
    }

    fn build(labels: Vec<String>, probs: Vec<f64>, log_probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::InvalidPmf(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if !(tail_mass >= 0.0 && tail_mass.is_finite()) {
            return Err(Error::InvalidPmf(format!("tail_mass {tail_mass} must be ≥ 0")));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, (label, p)) in labels.iter().zip(&probs).enumerate() {
            if !(*p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidPmf(format!("probability of `{label}` is {p}")));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidPmf(format!("duplicate label `{label}`")));
            }
        }
        let total = compensated_sum(probs.iter().copied()) + tail_mass;
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidPmf(format!("total mass is {total}, expected 1")));
        }
        Ok(Self {
            labels,
            probs,
            log_probs,
            tail_mass,
            index,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Probability of `label`, zero when the label is not listed.
    pub fn prob(&self, label: &str) -> f64 {
        self.index_of(label).map_or(0.0, |i| self.probs[i])
    }

    /// Number of listed symbols with positive probability.
    pub fn support_size(&self) -> usize {
        self.log_probs.iter().filter(|lp| **lp > f64::NEG_INFINITY).count()
    }

    /// Indices of the positive-probability symbols, most probable first;
    /// equal probabilities are ordered by label.
    pub fn sorted_support(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len())
            .filter(|&i| self.log_probs[i] > f64::NEG_INFINITY)
            .collect();
        idx.sort_by(|&a, &b| {
            self.log_probs[b]
                .total_cmp(&self.log_probs[a])
                .then_with(|| self.labels[a].cmp(&self.labels[b]))
        });
        idx
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels.iter().map(String::as_str).zip(self.probs.iter().copied())
    }

    pub fn to_record(&self) -> PmfRecord {
        PmfRecord {
            labels: self.labels.clone(),
            probs: self.probs.clone(),
            tail_mass: self.tail_mass,
        }
    }
}

impl TryFrom<PmfRecord> for Pmf {
    type Error = Error;

    fn try_from(r: PmfRecord) -> Result<Self> {
        Pmf::with_tail(r.labels, r.probs, r.tail_mass)
    }
}
