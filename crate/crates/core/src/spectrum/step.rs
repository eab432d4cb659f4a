use serde::Serialize;

use super::pmf::Pmf;
use crate::error::{Error, Result};
use crate::numeric::{KahanSum, EQ_TOL};

/// The self-information step function `c(δ)` of a pmf on `[0, covered_mass)`.
///
/// Segment `k` covers `[ends[k-1], ends[k])` (with `ends[-1] = 0`) and carries
/// the value `-log p` shared by `exp(log_mult[k])` symbols of probability
/// `exp(-values[k])`. Spectra built from a [`Pmf`] have one segment per symbol;
/// weight-class spectra group a whole class into one segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    ends: Vec<f64>,
    values: Vec<f64>,
    log_mult: Vec<f64>,
    covered: f64,
}

/// One constant piece of a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

impl Spectrum {
    /// Orders the support from most to least probable (ties by label) and
    /// lays the probabilities out as consecutive intervals of `[0, 1)`.
    pub fn from_pmf(p: &Pmf) -> Result<Self> {
        let order = p.sorted_support();
        if order.is_empty() {
            return Err(Error::Degenerate("pmf has no symbol with positive probability".into()));
        }
        let pieces = order.iter().map(|&i| (-p.log_probs()[i], 0.0, p.probs()[i]));
        Self::assemble(pieces, 1.0 - p.tail_mass())
    }

    /// Builds a spectrum from `(value, log_multiplicity, mass)` pieces already
    /// sorted by non-decreasing value. The last breakpoint is snapped to
    /// `covered`; pieces too small to move the cumulative sum are dropped.
    pub fn from_pieces<I>(pieces: I, covered: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        Self::assemble(pieces, covered)
    }

    fn assemble<I>(pieces: I, covered: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        if !(covered > 0.0 && covered <= 1.0 + EQ_TOL) {
            return Err(Error::Degenerate(format!("covered mass {covered} is not in (0, 1]")));
        }
        let covered = covered.min(1.0);
        let mut ends: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut log_mult: Vec<f64> = Vec::new();
        let mut acc = KahanSum::new();
        let mut prev = 0.0;
        for (value, lm, mass) in pieces {
            if let Some(&last) = values.last() {
                if value < last - EQ_TOL {
                    return Err(Error::Domain("spectrum pieces must be sorted by value".into()));
                }
            }
            acc.add(mass);
            let end = acc.value().min(covered);
            if end > prev {
                ends.push(end);
                values.push(value);
                log_mult.push(lm);
                prev = end;
            }
        }
        if ends.is_empty() {
            return Err(Error::Degenerate("spectrum has zero total mass".into()));
        }
        // Absorb rounding in the cumulative sum.
        let last = ends.len() - 1;
        let lower = if last == 0 { 0.0 } else { ends[last - 1] };
        if covered > lower {
            ends[last] = covered;
        }
        let covered = ends[last];
        Ok(Self {
            ends,
            values,
            log_mult,
            covered,
        })
    }

    /// Right endpoints `δ_1 < … < δ_m`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.ends
    }

    /// Segment values `v_1 ≤ … ≤ v_m` (natural-log self-information).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_multiplicities(&self) -> &[f64] {
        &self.log_mult
    }

    pub fn covered_mass(&self) -> f64 {
        self.covered
    }

    pub fn is_full(&self) -> bool {
        (self.covered - 1.0).abs() <= EQ_TOL
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.ends.iter().enumerate().map(move |(k, &hi)| Segment {
            lo: if k == 0 { 0.0 } else { self.ends[k - 1] },
            hi,
            value: self.values[k],
        })
    }

    /// `c(δ)`: the value of the segment `[δ_{k-1}, δ_k)` containing `delta`.
    pub fn eval(&self, delta: f64) -> Result<f64> {
        if !(delta >= 0.0) {
            return Err(Error::Domain(format!("delta {delta} must be ≥ 0")));
        }
        if delta >= self.covered {
            return Err(Error::OutOfCoverage {
                delta,
                covered: self.covered,
            });
        }
        let k = self.ends.partition_point(|&e| e <= delta);
        Ok(self.values[k])
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Number of support symbols, `Σ (δ_k − δ_{k−1})·exp(v_k)` in exact arithmetic.
    pub fn support_size(&self) -> f64 {
        self.log_mult.iter().map(|lm| lm.exp()).sum()
    }

    /// The spectrum with every value shifted by `offset`.
    pub fn offset(&self, offset: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + offset).collect(),
            ..self.clone()
        }
    }
}

/// Piecewise-constant function on `[0, domain)`, typically
/// `δ ↦ c^x(δ + shift) − c^y(δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDiff {
    ends: Vec<f64>,
    values: Vec<f64>,
    domain: f64,
}

impl StepDiff {
    /// Merges the breakpoints of `x` (shifted left by `shift`) and `y`.
    /// Breakpoints closer than [`EQ_TOL`] are treated as one.
    pub fn between(x: &Spectrum, y: &Spectrum, shift: f64) -> Result<Self> {
        if !(shift >= 0.0 && shift < x.covered) {
            return Err(Error::Domain(format!(
                "shift {shift} must lie in [0, {})",
                x.covered
            )));
        }
        let domain = (x.covered - shift).min(y.covered);
        let mut ends = Vec::with_capacity(x.len() + y.len());
        let mut values = Vec::with_capacity(x.len() + y.len());
        let mut i = x.ends.partition_point(|&e| e <= shift);
        let mut j = 0;
        let mut pos = 0.0;
        while pos < domain {
            let nx = x.ends[i] - shift;
            let ny = y.ends[j];
            let mut next = nx.min(ny);
            let value = x.values[i] - y.values[j];
            let adv_x = nx - next <= EQ_TOL;
            let adv_y = ny - next <= EQ_TOL;
            if next >= domain - EQ_TOL {
                next = domain;
            }
            match values.last() {
                Some(&last) if last == value => *ends.last_mut().unwrap() = next,
                _ => {
                    ends.push(next);
                    values.push(value);
                }
            }
            pos = next;
            if pos >= domain {
                break;
            }
            if adv_x {
                i += 1;
            }
            if adv_y {
                j += 1;
            }
        }
        Ok(Self {
            ends,
            values,
            domain,
        })
    }

    pub fn domain(&self) -> f64 {
        self.domain
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.ends
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.ends.iter().enumerate().map(move |(k, &hi)| Segment {
            lo: if k == 0 { 0.0 } else { self.ends[k - 1] },
            hi,
            value: self.values[k],
        })
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lebesgue measure of `{δ ∈ [0, domain) : f(δ) < threshold}`.
    pub fn measure_below(&self, threshold: f64) -> f64 {
        let mut acc = KahanSum::new();
        for s in self.segments().filter(|s| s.value < threshold) {
            acc.add(s.hi - s.lo);
        }
        acc.value().clamp(0.0, self.domain)
    }

    /// Infimum over the segments that meet any of the open intervals `(a, b)`.
    pub fn inf_over(&self, intervals: &[(f64, f64)]) -> Option<f64> {
        self.segments()
            .filter(|s| intervals.iter().any(|&(a, b)| s.lo < b && s.hi > a && a < b))
            .map(|s| s.value)
            .reduce(f64::min)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Lebesgue measure of a sub-level set, exact when both spectra cover `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    Exact { value: f64 },
    /// Part of `[0, 1)` lies beyond a truncated spectrum; the true measure is
    /// somewhere in `[lower, upper]`.
    Bounds { lower: f64, upper: f64 },
}

impl Measure {
    pub fn exact(&self) -> Option<f64> {
        match *self {
            Measure::Exact { value } => Some(value),
            Measure::Bounds { .. } => None,
        }
    }

    pub fn lower(&self) -> f64 {
        match *self {
            Measure::Exact { value } => value,
            Measure::Bounds { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            Measure::Exact { value } => value,
            Measure::Bounds { upper, .. } => upper,
        }
    }
}
