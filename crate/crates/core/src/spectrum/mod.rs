//! Entropy-spectrum step functions and the sub-level-set measures built on them.
//!
//! A pmf's spectrum `c(δ)` sorts the support from most to least probable,
//! lays the probabilities end to end on `[0, 1)`, and returns `log(1/p)` of
//! the symbol whose interval contains `δ`. Everything here is exact interval
//! arithmetic over the breakpoints; no sampling or gridding is involved.

mod pmf;
mod step;

pub use pmf::{Pmf, PmfRecord, MASS_TOL};
pub use step::{Measure, Segment, Spectrum, StepDiff};

use crate::error::{Error, Result};

pub fn build_spectrum(p: &Pmf) -> Result<Spectrum> {
    Spectrum::from_pmf(p)
}

pub fn eval_c(s: &Spectrum, delta: f64) -> Result<f64> {
    s.eval(delta)
}

/// Measure of `{δ ∈ [0,1) : c^x(δ) − c^y(δ) < γ}`.
///
/// When either spectrum is truncated, the part of `[0, 1)` past the shorter
/// coverage is counted as in the set for the upper bound and out of it for
/// the lower bound.
pub fn deficiency_measure(sx: &Spectrum, sy: &Spectrum, gamma: f64) -> Result<Measure> {
    let diff = StepDiff::between(sx, sy, 0.0)?;
    let known = diff.measure_below(gamma);
    if sx.is_full() && sy.is_full() {
        Ok(Measure::Exact { value: known })
    } else {
        let unknown = (1.0 - diff.domain()).max(0.0);
        Ok(Measure::Bounds {
            lower: known,
            upper: (known + unknown).min(1.0),
        })
    }
}

/// `δ ↦ c^x(δ + ε) − c^y(δ)` on `[0, 1 − ε)`.
pub fn shifted_gap(sx: &Spectrum, sy: &Spectrum, eps: f64) -> Result<StepDiff> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps {eps} must lie in (0, 1)")));
    }
    if !(sx.is_full() && sy.is_full()) {
        return Err(Error::Truncated("shifted gap needs spectra covering [0, 1)".into()));
    }
    StepDiff::between(sx, sy, eps)
}

/// Rows `(delta_lo, delta_hi, c_value)` for step plots.
pub fn dump_rows(s: &Spectrum) -> Vec<(f64, f64, f64)> {
    s.segments().map(|seg| (seg.lo, seg.hi, seg.value)).collect()
}
