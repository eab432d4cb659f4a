use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{KahanSum, EQ_TOL};
use crate::spectrum::{build_spectrum, deficiency_measure, Pmf};

use super::variational_distance;

/// Parameters and indices recorded by [`build_mapping`]. Indices are 1-based
/// positions in the sorted (most probable first) support lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MappingMeta {
    pub eps: f64,
    pub gamma: f64,
    /// Number of leading coin symbols mapped by interval alignment.
    pub i1: usize,
    /// Number of leading target symbols that can receive mass.
    pub i2: usize,
    /// Target index hit by the last aligned coin symbol.
    pub j2: usize,
}

/// A total function from coin labels to target labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicMap {
    domain: Vec<String>,
    codomain: Vec<String>,
    assignment: Vec<usize>,
    domain_index: HashMap<String, usize>,
    meta: Option<MappingMeta>,
}

impl DeterministicMap {
    /// `assignment[i]` is the codomain index of `domain[i]`.
    pub fn new(domain: Vec<String>, codomain: Vec<String>, assignment: Vec<usize>) -> Result<Self> {
        if domain.len() != assignment.len() {
            return Err(Error::Domain(format!(
                "{} domain labels but {} assignments",
                domain.len(),
                assignment.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&j| j >= codomain.len()) {
            return Err(Error::Domain(format!("assignment index {bad} is outside the codomain")));
        }
        let mut domain_index = HashMap::with_capacity(domain.len());
        for (i, l) in domain.iter().enumerate() {
            if domain_index.insert(l.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate domain label `{l}`")));
            }
        }
        Ok(Self {
            domain,
            codomain,
            assignment,
            domain_index,
            meta: None,
        })
    }

    /// Builds a map from `(from, to)` label pairs; the codomain is the given
    /// list, and every `to` must belong to it.
    pub fn from_pairs<I>(pairs: I, codomain: Vec<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let cod: HashMap<&str, usize> =
            codomain.iter().enumerate().map(|(j, l)| (l.as_str(), j)).collect();
        let mut domain = Vec::new();
        let mut assignment = Vec::new();
        for (from, to) in pairs {
            let j = *cod
                .get(to.as_str())
                .ok_or_else(|| Error::Domain(format!("image `{to}` is not a codomain label")))?;
            domain.push(from);
            assignment.push(j);
        }
        Self::new(domain, codomain, assignment)
    }

    /// Identity map on the labels of `p`.
    pub fn identity(p: &Pmf) -> Self {
        let labels = p.labels().to_vec();
        Self::new(labels.clone(), labels, (0..p.len()).collect()).expect("identity is valid")
    }

    pub fn with_meta(mut self, meta: MappingMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn meta(&self) -> Option<&MappingMeta> {
        self.meta.as_ref()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn image(&self, label: &str) -> Option<&str> {
        self.domain_index
            .get(label)
            .map(|&i| self.codomain[self.assignment[i]].as_str())
    }

    /// `(from_label, to_label)` rows in domain order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, &str)> {
        self.domain
            .iter()
            .zip(&self.assignment)
            .map(|(d, &j)| (d.as_str(), self.codomain[j].as_str()))
    }
}

/// Distribution of `φ(X)` over the map's codomain.
pub fn pushforward(map: &DeterministicMap, p: &Pmf) -> Result<Pmf> {
    let mut mass = vec![0.0; map.codomain.len()];
    let mut log_mass = vec![f64::NEG_INFINITY; map.codomain.len()];
    for (i, (label, prob)) in p.iter().enumerate() {
        match map.domain_index.get(label) {
            Some(&d) => {
                let j = map.assignment[d];
                mass[j] += prob;
                log_mass[j] = crate::numeric::log_add_exp(log_mass[j], p.log_probs()[i]);
            }
            None if prob > 0.0 => return Err(Error::UnknownSymbol(label.to_string())),
            None => {}
        }
    }
    // Linear masses are used where they are representable; the log-domain
    // accumulation only matters for masses that underflow.
    let log_mass: Vec<f64> = mass
        .iter()
        .zip(log_mass)
        .map(|(&m, lm)| if m > 0.0 { m.ln() } else { lm })
        .collect();
    Pmf::from_parts(map.codomain.clone(), mass, log_mass, p.tail_mass())
}

fn check_hypothesis(eps: f64, gamma: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("eps {eps} must lie in (0, 1)")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Precondition(format!("gamma {gamma} must be positive")));
    }
    // equality is allowed; a relative ulp-scale slack absorbs exp/ln round trips
    if (-gamma).exp() > eps * (1.0 + EQ_TOL) {
        return Err(Error::Precondition(format!(
            "exp(-gamma) = {} exceeds eps = {eps}",
            (-gamma).exp()
        )));
    }
    Ok(())
}

/// Smallest `j ≥ 1` such that the mass after the first `j` sorted symbols
/// (plus any unlisted tail) is strictly below `eps`.
fn head_count(p: &Pmf, order: &[usize], eps: f64) -> Result<usize> {
    let mut suffix = vec![0.0; order.len() + 1];
    let mut acc = KahanSum::new();
    acc.add(p.tail_mass());
    suffix[order.len()] = acc.value();
    for k in (0..order.len()).rev() {
        acc.add(p.probs()[order[k]]);
        suffix[k] = acc.value();
    }
    (1..=order.len())
        .find(|&j| suffix[j] < eps)
        .ok_or_else(|| {
            Error::Truncated(format!(
                "unlisted tail mass {} never drops below eps {eps}",
                p.tail_mass()
            ))
        })
}

fn prefix_ends(p: &Pmf, order: &[usize], count: usize) -> Vec<f64> {
    let mut acc = KahanSum::new();
    order[..count]
        .iter()
        .map(|&i| {
            acc.add(p.probs()[i]);
            acc.value()
        })
        .collect()
}

/// Interval-alignment map from `coin` to `target`.
///
/// Both supports are sorted most probable first. The first `i1` coin symbols
/// are sent to the target symbol whose interval contains the left end of
/// their own interval; every other coin symbol goes to target symbol `i2`.
pub fn build_mapping(coin: &Pmf, target: &Pmf, eps: f64, gamma: f64) -> Result<DeterministicMap> {
    check_hypothesis(eps, gamma)?;
    let ty = target.sorted_support();
    if ty.is_empty() {
        return Err(Error::Degenerate("target has no positive-probability symbol".into()));
    }
    let tx = coin.sorted_support();
    if tx.is_empty() {
        return Err(Error::Degenerate("coin has no positive-probability symbol".into()));
    }
    let i1 = head_count(coin, &tx, eps)?;
    let i2 = head_count(target, &ty, eps)?;
    let dx = prefix_ends(coin, &tx, i1);
    let dy = prefix_ends(target, &ty, i2);

    let fallback = ty[i2 - 1];
    let mut assignment = vec![fallback; coin.len()];
    let mut j2 = i2;
    for i in 0..i1 {
        let left = if i == 0 { 0.0 } else { dx[i - 1] };
        // j (0-based) with dy[j-1] <= left < dy[j]
        let j = dy.partition_point(|&e| e <= left).min(i2 - 1);
        assignment[tx[i]] = ty[j];
        if i + 1 == i1 {
            j2 = j + 1;
        }
    }
    let meta = MappingMeta {
        eps,
        gamma,
        i1,
        i2,
        j2,
    };
    Ok(DeterministicMap::new(coin.labels().to_vec(), target.labels().to_vec(), assignment)?.with_meta(meta))
}

/// Outcome of running the interval-alignment construction against its
/// `9ε + 10·μ(E(γ))` guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub d: f64,
    pub bound: f64,
    pub eps: f64,
    pub gamma: f64,
    pub deficiency: f64,
    pub pass: bool,
    pub i1: usize,
    pub i2: usize,
    pub j2: usize,
}

pub const BOUND_SLACK: f64 = 1e-9;

pub fn check_distance_bound(coin: &Pmf, target: &Pmf, eps: f64, gamma: f64) -> Result<BoundReport> {
    let (_, report) = simulate_source(coin, target, eps, gamma)?;
    Ok(report)
}

/// Builds the mapping and evaluates it against the bound in one pass.
pub fn simulate_source(
    coin: &Pmf,
    target: &Pmf,
    eps: f64,
    gamma: f64,
) -> Result<(DeterministicMap, BoundReport)> {
    if coin.tail_mass() > 0.0 || target.tail_mass() > 0.0 {
        return Err(Error::Truncated("the bound check needs fully listed pmfs".into()));
    }
    let map = build_mapping(coin, target, eps, gamma)?;
    let simulated = pushforward(&map, coin)?;
    let d = variational_distance(target, &simulated)?;
    let deficiency = deficiency_measure(&build_spectrum(coin)?, &build_spectrum(target)?, gamma)?
        .exact()
        .expect("full coverage gives an exact measure");
    let bound = 9.0 * eps + 10.0 * deficiency;
    let meta = *map.meta().expect("build_mapping records meta");
    let report = BoundReport {
        d,
        bound,
        eps,
        gamma,
        deficiency,
        pass: d <= bound + BOUND_SLACK,
        i1: meta.i1,
        i2: meta.i2,
        j2: meta.j2,
    };
    Ok((map, report))
}
