use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::Pmf;

/// Finite distribution of a real-valued random variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealRvDist {
    values: Vec<f64>,
    cdf: Vec<f64>,
}

impl RealRvDist {
    /// Atoms may repeat and come in any order; they are sorted and merged.
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        if let Some(&(v, p)) = atoms.iter().find(|(v, p)| !v.is_finite() || !(*p >= 0.0)) {
            return Err(Error::Domain(format!("atom ({v}, {p}) is not a finite value with mass ≥ 0")));
        }
        atoms.retain(|&(_, p)| p > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values = Vec::with_capacity(atoms.len());
        let mut cdf = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for (v, p) in atoms {
            acc += p;
            if values.last() == Some(&v) {
                *cdf.last_mut().unwrap() = acc;
            } else {
                values.push(v);
                cdf.push(acc);
            }
        }
        if (acc - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("atoms carry total mass {acc}, expected 1")));
        }
        // pin the final level so F(+inf) = 1 exactly
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self { values, cdf })
    }

    /// Law of `log 1/p(X)` for `X ~ p`.
    pub fn self_information(p: &Pmf) -> Result<Self> {
        if p.tail_mass() > 0.0 {
            return Err(Error::Truncated("self-information law needs a fully listed pmf".into()));
        }
        Self::new(
            p.probs()
                .iter()
                .zip(p.log_probs())
                .filter(|(pr, _)| **pr > 0.0)
                .map(|(pr, lp)| (-lp, *pr)),
        )
    }

    pub fn point(v: f64) -> Self {
        Self::new([(v, 1.0)]).expect("finite point mass")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Pr{U ≤ x}`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else {
            self.cdf[k - 1]
        }
    }

    fn cdf_at_atom(&self, k: usize) -> f64 {
        self.cdf[k]
    }
}

const CDF_SLACK: f64 = 1e-15;

/// Does `F_U(x − μ) − μ ≤ F_V(x) ≤ F_U(x + μ) + μ` hold for every `x`?
///
/// Both sides are right-continuous step functions, so each one-sided
/// violation is maximized at a jump of the leading CDF.
fn sandwich_holds(u: &RealRvDist, v: &RealRvDist, mu: f64) -> bool {
    let lower_ok = (0..u.values.len()).all(|k| {
        let x = u.values[k] + mu;
        u.cdf_at_atom(k) - mu <= v.cdf(x) + CDF_SLACK
    });
    let upper_ok = (0..v.values.len()).all(|k| {
        let x = v.values[k];
        v.cdf_at_atom(k) <= u.cdf(x + mu) + mu + CDF_SLACK
    });
    lower_ok && upper_ok
}

const BISECT_TOL: f64 = 1e-10;
const SNAP_TOL: f64 = 1e-9;

/// Lévy distance: the smallest `μ ≥ 0` for which `F_V` stays within the
/// `μ`-widened band around `F_U`.
///
/// The sandwich predicate is monotone in `μ` and always holds at `μ = 1`,
/// so bisection brackets the infimum; the bracket is then snapped to the
/// nearest exact candidate (a difference of atom locations or of CDF levels)
/// when one lies within `1e-9`.
pub fn levy_distance(u: &RealRvDist, v: &RealRvDist) -> f64 {
    if sandwich_holds(u, v, 0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if sandwich_holds(u, v, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    snap_to_candidate(u, v, hi)
}

fn snap_to_candidate(u: &RealRvDist, v: &RealRvDist, approx: f64) -> f64 {
    let mut best = approx;
    let mut best_err = SNAP_TOL;
    let mut consider = |c: f64| {
        let c = c.abs();
        let err = (c - approx).abs();
        if err <= best_err && c <= 1.0 {
            best = c;
            best_err = err;
        }
    };
    consider(1.0);
    for &a in &u.values {
        for &b in &v.values {
            consider(a - b);
        }
    }
    let levels = |d: &RealRvDist| std::iter::once(0.0).chain(d.cdf.iter().copied()).collect::<Vec<_>>();
    let (lu, lv) = (levels(u), levels(v));
    for &a in &lu {
        for &b in &lv {
            consider(a - b);
        }
    }
    best
}
