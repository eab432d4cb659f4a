use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{KahanSum, EQ_TOL};
use crate::spectrum::Pmf;

/// Joint pmf over pairs of labels, with the marginals it was built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    /// `(x index, y index, probability)`, sorted by `(x, y)`.
    entries: Vec<(usize, usize, f64)>,
    marginal_x: Vec<f64>,
    marginal_y: Vec<f64>,
    x_info: Vec<f64>,
    y_info: Vec<f64>,
}

impl JointPmf {
    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn marginal_x(&self) -> &[f64] {
        &self.marginal_x
    }

    pub fn marginal_y(&self) -> &[f64] {
        &self.marginal_y
    }

    pub fn prob(&self, x: &str, y: &str) -> f64 {
        self.entries
            .iter()
            .filter(|(i, j, _)| self.x_labels[*i] == x && self.y_labels[*j] == y)
            .map(|e| e.2)
            .sum()
    }

    /// Marginals recomputed from the joint entries.
    pub fn computed_marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let mut mx = vec![KahanSum::new(); self.x_labels.len()];
        let mut my = vec![KahanSum::new(); self.y_labels.len()];
        for &(i, j, p) in &self.entries {
            mx[i].add(p);
            my[j].add(p);
        }
        (
            mx.iter().map(KahanSum::value).collect(),
            my.iter().map(KahanSum::value).collect(),
        )
    }

    /// Largest absolute deviation between stored and recomputed marginals.
    pub fn marginal_error(&self) -> f64 {
        let (mx, my) = self.computed_marginals();
        let dx = mx.iter().zip(&self.marginal_x).map(|(a, b)| (a - b).abs());
        let dy = my.iter().zip(&self.marginal_y).map(|(a, b)| (a - b).abs());
        dx.chain(dy).fold(0.0, f64::max)
    }

    /// `Pr{log 1/P_X(X) − log 1/P_Y(Y) < threshold}` under this joint law.
    pub fn log_ratio_below(&self, threshold: f64) -> f64 {
        let mut acc = KahanSum::new();
        for &(i, j, p) in &self.entries {
            if self.x_info[i] - self.y_info[j] < threshold {
                acc.add(p);
            }
        }
        acc.value()
    }

    /// `(x_label, y_label, prob)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.entries
            .iter()
            .map(|&(i, j, p)| (self.x_labels[i].as_str(), self.y_labels[j].as_str(), p))
    }
}

struct Layout {
    labels: Vec<String>,
    probs: Vec<f64>,
    info: Vec<f64>,
    ends: Vec<f64>,
}

fn layout(p: &Pmf) -> Result<Layout> {
    if p.tail_mass() > 0.0 {
        return Err(Error::Truncated("the shifted coupling needs fully listed pmfs".into()));
    }
    let order = p.sorted_support();
    if order.is_empty() {
        return Err(Error::Degenerate("pmf has no positive-probability symbol".into()));
    }
    let mut acc = KahanSum::new();
    let mut ends: Vec<f64> = order
        .iter()
        .map(|&i| {
            acc.add(p.probs()[i]);
            acc.value()
        })
        .collect();
    *ends.last_mut().unwrap() = 1.0;
    Ok(Layout {
        labels: order.iter().map(|&i| p.labels()[i].clone()).collect(),
        probs: order.iter().map(|&i| p.probs()[i]).collect(),
        info: order.iter().map(|&i| -p.log_probs()[i]).collect(),
        ends,
    })
}

/// Couples `x` and `y` through one uniform `ω ∈ [0, 1)`: `Y` is read off the
/// sorted layout of `y` at `ω`, and `X` off the layout of `x` at `ω + ε`
/// wrapped modulo 1. Labels in the result are in sorted-support order.
pub fn shifted_coupling(x: &Pmf, y: &Pmf, eps: f64) -> Result<JointPmf> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps {eps} must lie in (0, 1)")));
    }
    let lx = layout(x)?;
    let ly = layout(y)?;

    // Pieces of [0,1) in ω on which the x index is constant: (end, x index).
    let mut xs: Vec<(f64, usize)> = Vec::with_capacity(lx.ends.len() + 2);
    let first = lx.ends.partition_point(|&e| e <= eps);
    for (k, &e) in lx.ends.iter().enumerate().skip(first) {
        xs.push((e - eps, k));
    }
    // ω ≥ 1 − ε wraps to ω + ε − 1 ∈ [0, ε)
    let wrap = 1.0 - eps;
    if let Some(last) = xs.last_mut() {
        last.0 = wrap;
    }
    for (k, &e) in lx.ends.iter().enumerate() {
        let lo = if k == 0 { 0.0 } else { lx.ends[k - 1] };
        if lo >= eps {
            break;
        }
        xs.push(((e.min(eps) + wrap).min(1.0), k));
    }
    xs.last_mut().unwrap().0 = 1.0;

    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    let (mut a, mut b) = (0, 0);
    let mut pos = 0.0;
    while a < xs.len() && b < ly.ends.len() {
        let (ex, i) = xs[a];
        let ey = ly.ends[b];
        let next = ex.min(ey);
        if next > pos {
            cells.push((i, b, next - pos));
            pos = next;
        }
        if ex - next <= EQ_TOL * 1e-3 {
            a += 1;
        }
        if ey - next <= EQ_TOL * 1e-3 {
            b += 1;
        }
    }
    cells.sort_by(|p, q| (p.0, p.1).cmp(&(q.0, q.1)));
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(cells.len());
    for (i, j, m) in cells {
        match entries.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += m,
            _ => entries.push((i, j, m)),
        }
    }
    Ok(JointPmf {
        x_labels: lx.labels,
        y_labels: ly.labels,
        entries,
        marginal_x: lx.probs,
        marginal_y: ly.probs,
        x_info: lx.info,
        y_info: ly.info,
    })
}
