//! Channel simulation: one source-simulation problem per input symbol,
//! averaged under the input distribution.

use std::collections::HashMap;
use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::source::{build_mapping, pushforward, variational_distance, DeterministicMap};
use crate::spectrum::{build_spectrum, deficiency_measure, shifted_gap, Pmf, Spectrum};

/// A table of pmfs indexed by input label.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPmf {
    inputs: Vec<String>,
    outputs: Vec<String>,
    rows: Vec<Pmf>,
    index: HashMap<String, usize>,
}

impl ConditionalPmf {
    pub fn new<I: IntoIterator<Item = (String, Pmf)>>(rows: I) -> Result<Self> {
        let mut inputs = Vec::new();
        let mut table = Vec::new();
        let mut index = HashMap::new();
        let mut outputs = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (x, row) in rows {
            if row.tail_mass() > 0.0 {
                return Err(Error::Truncated(format!("row `{x}` has unlisted tail mass")));
            }
            if index.insert(x.clone(), inputs.len()).is_some() {
                return Err(Error::AlphabetMismatch(format!("input `{x}` has two rows")));
            }
            for l in row.labels() {
                if seen.insert(l.clone()) {
                    outputs.push(l.clone());
                }
            }
            inputs.push(x);
            table.push(row);
        }
        Ok(Self {
            inputs,
            outputs,
            rows: table,
            index,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    /// Union of the row labels, in first-appearance order.
    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn row(&self, x: &str) -> Option<&Pmf> {
        self.index.get(x).map(|&i| &self.rows[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &Pmf)> {
        self.inputs.iter().map(String::as_str).zip(&self.rows)
    }
}

/// `W(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel(pub ConditionalPmf);

/// `P(z|x)`; identical rows mean the coin is independent of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinCoupling(pub ConditionalPmf);

impl Deref for Channel {
    type Target = ConditionalPmf;
    fn deref(&self) -> &ConditionalPmf {
        &self.0
    }
}

impl Deref for CoinCoupling {
    type Target = ConditionalPmf;
    fn deref(&self) -> &ConditionalPmf {
        &self.0
    }
}

impl Channel {
    pub fn new<I: IntoIterator<Item = (String, Pmf)>>(rows: I) -> Result<Self> {
        ConditionalPmf::new(rows).map(Self)
    }
}

impl CoinCoupling {
    pub fn new<I: IntoIterator<Item = (String, Pmf)>>(rows: I) -> Result<Self> {
        ConditionalPmf::new(rows).map(Self)
    }

    /// The same coin pmf for every listed input.
    pub fn independent<'a, I: IntoIterator<Item = &'a str>>(inputs: I, coin: &Pmf) -> Result<Self> {
        Self::new(inputs.into_iter().map(|x| (x.to_string(), coin.clone())))
    }
}

/// One deterministic map per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMap {
    maps: Vec<(String, DeterministicMap)>,
}

impl ChannelMap {
    pub fn new(maps: Vec<(String, DeterministicMap)>) -> Self {
        Self { maps }
    }

    pub fn get(&self, x: &str) -> Option<&DeterministicMap> {
        self.maps.iter().find(|(l, _)| l == x).map(|(_, m)| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DeterministicMap)> {
        self.maps.iter().map(|(x, m)| (x.as_str(), m))
    }

    /// `(x_label, z_label, y_label)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.maps
            .iter()
            .flat_map(|(x, m)| m.rows().map(move |(z, y)| (x.as_str(), z, y)))
    }
}

/// Spectra of `P(·|x)` and `W(·|x)` for one input symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSpectra {
    pub input: String,
    pub coin: Spectrum,
    pub channel: Spectrum,
}

fn rows_for<'a>(chan: &'a Channel, coupling: &'a CoinCoupling, x: &str) -> Result<(&'a Pmf, &'a Pmf)> {
    let w = chan
        .row(x)
        .ok_or_else(|| Error::AlphabetMismatch(format!("channel has no row for input `{x}`")))?;
    let z = coupling
        .row(x)
        .ok_or_else(|| Error::AlphabetMismatch(format!("coupling has no row for input `{x}`")))?;
    Ok((z, w))
}

/// Row-wise spectra, in the channel's input order. Every channel input must
/// have a coupling row and vice versa.
pub fn per_input_spectra(chan: &Channel, coupling: &CoinCoupling) -> Result<Vec<RowSpectra>> {
    if let Some(x) = coupling.inputs().iter().find(|x| chan.row(x).is_none()) {
        return Err(Error::AlphabetMismatch(format!("channel has no row for input `{x}`")));
    }
    chan.inputs()
        .iter()
        .map(|x| {
            let (z, w) = rows_for(chan, coupling, x)?;
            Ok(RowSpectra {
                input: x.clone(),
                coin: build_spectrum(z)?,
                channel: build_spectrum(w)?,
            })
        })
        .collect()
}

/// Inputs with positive probability, paired with their coin and channel rows.
fn active_rows<'a>(
    input: &'a Pmf,
    chan: &'a Channel,
    coupling: &'a CoinCoupling,
) -> Result<Vec<(&'a str, f64, &'a Pmf, &'a Pmf)>> {
    if input.tail_mass() > 0.0 {
        return Err(Error::Truncated("input pmf has unlisted tail mass".into()));
    }
    input
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(x, p)| {
            let (z, w) = rows_for(chan, coupling, x)?;
            Ok((x, p, z, w))
        })
        .collect()
}

/// `E_x[ μ{δ : c^{z|x}(δ) − c^w(δ, x) < γ} ]`.
pub fn expected_deficiency(input: &Pmf, chan: &Channel, coupling: &CoinCoupling, gamma: f64) -> Result<f64> {
    let mut acc = KahanSum::new();
    for (_, px, z, w) in active_rows(input, chan, coupling)? {
        let m = deficiency_measure(&build_spectrum(z)?, &build_spectrum(w)?, gamma)?;
        let m = m
            .exact()
            .ok_or_else(|| Error::Truncated("row spectra must cover [0, 1)".into()))?;
        acc.add(px * m);
    }
    Ok(acc.value())
}

/// `E_x[ μ{δ ∈ [0, 1−ε) : c^{z|x}(δ+ε) − c^w(δ, x) < −γ} ]`.
pub fn expected_shifted_deficiency(
    input: &Pmf,
    chan: &Channel,
    coupling: &CoinCoupling,
    eps: f64,
    gamma: f64,
) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma {gamma} must be positive")));
    }
    let mut acc = KahanSum::new();
    for (_, px, z, w) in active_rows(input, chan, coupling)? {
        let gap = shifted_gap(&build_spectrum(z)?, &build_spectrum(w)?, eps)?;
        acc.add(px * gap.measure_below(-gamma));
    }
    Ok(acc.value())
}

/// Builds `φ^x` from `P(·|x)` to `W(·|x)` for every input of positive
/// probability; zero-probability inputs get no map.
pub fn build_channel_map(
    input: &Pmf,
    chan: &Channel,
    coupling: &CoinCoupling,
    eps: f64,
    gamma: f64,
) -> Result<ChannelMap> {
    let maps = active_rows(input, chan, coupling)?
        .into_iter()
        .map(|(x, _, z, w)| {
            build_mapping(z, w, eps, gamma)
                .map(|m| (x.to_string(), m))
                .map_err(|e| Error::Row {
                    input: x.to_string(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelMap::new(maps))
}

/// `d(XY, Xφ(X,Z)) = Σ_x P(x) · d(W(·|x), φ^x_*(P(·|x)))`.
pub fn joint_distance(input: &Pmf, chan: &Channel, coupling: &CoinCoupling, cm: &ChannelMap) -> Result<f64> {
    let mut acc = KahanSum::new();
    for (x, px, z, w) in active_rows(input, chan, coupling)? {
        let map = cm
            .get(x)
            .ok_or_else(|| Error::AlphabetMismatch(format!("channel map has no entry for input `{x}`")))?;
        let simulated = pushforward(map, z)?;
        acc.add(px * variational_distance(w, &simulated)?);
    }
    Ok(acc.value())
}

/// Everything the channel command reports for one `(ε, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelReport {
    pub eps: f64,
    pub gamma: f64,
    pub joint_distance: f64,
    pub expected_deficiency: f64,
    pub expected_shifted_deficiency: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn simulate_channel(
    input: &Pmf,
    chan: &Channel,
    coupling: &CoinCoupling,
    eps: f64,
    gamma: f64,
) -> Result<(ChannelMap, ChannelReport)> {
    let cm = build_channel_map(input, chan, coupling, eps, gamma)?;
    let jd = joint_distance(input, chan, coupling, &cm)?;
    let ed = expected_deficiency(input, chan, coupling, gamma)?;
    let esd = expected_shifted_deficiency(input, chan, coupling, eps, gamma)?;
    let bound = 9.0 * eps + 10.0 * ed;
    Ok((
        cm,
        ChannelReport {
            eps,
            gamma,
            joint_distance: jd,
            expected_deficiency: ed,
            expected_shifted_deficiency: esd,
            bound,
            pass: jd <= bound + crate::source::BOUND_SLACK,
        },
    ))
}
