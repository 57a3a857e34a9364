//! Brute-force reference computations.
//!
//! Nothing here reuses the interval search of [`crate::maxima`]: maxima are
//! plain scans over an evenly spaced lattice, without refinement, so the two
//! implementations fail in different ways.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::maxima::MaximaReport;
use crate::problem::{NodeConfig, Problem};

/// Scan window `[−extent, extent]` sampled every `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub step: f64,
    pub extent: f64,
}

impl GridSpec {
    pub fn new(step: f64, extent: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidInput("grid step and extent must be positive".into()));
        }
        Ok(GridSpec { step, extent })
    }

    /// Index of the last lattice point `−extent + k·step ≤ extent`.
    fn last_index(&self) -> usize {
        (2.0 * self.extent / self.step).floor() as usize
    }

    fn t(&self, k: usize) -> f64 {
        -self.extent + k as f64 * self.step
    }
}

/// Interval maxima by exhaustive scan. Each interval is sampled at its
/// endpoints and at every lattice point inside it; discrete fields are
/// evaluated at their support points instead.
pub fn grid_local_maxima(problem: &Problem, y: &NodeConfig, spec: GridSpec) -> Result<MaximaReport> {
    problem.check_dimension(y)?;
    let nodes = y.as_slice();
    let mut bounds = Vec::with_capacity(nodes.len() + 2);
    bounds.push(-spec.extent);
    bounds.extend_from_slice(nodes);
    bounds.push(spec.extent);

    let support = problem.field().finite_support();
    let mut m = Vec::with_capacity(nodes.len() + 1);
    let mut z = Vec::with_capacity(nodes.len() + 1);
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut best = (f64::NAN, f64::NEG_INFINITY);
        let mut visit = |t: f64| {
            let v = problem.f_raw(nodes, t);
            if v > best.1 {
                best = (t, v);
            }
        };
        match &support {
            Some(points) => {
                for &(x, _) in points {
                    if lo <= x && x <= hi {
                        visit(x);
                    }
                }
            }
            None => {
                visit(lo);
                let first = ((lo + spec.extent) / spec.step).ceil().max(0.0) as usize;
                let mut k = first;
                while k <= spec.last_index() && spec.t(k) < hi {
                    visit(spec.t(k));
                    k += 1;
                }
                visit(hi);
            }
        }
        m.push(ExtReal::from_f64(best.1));
        z.push(best.1.is_finite().then_some(best.0));
    }
    let in_regularity_set = m.iter().all(|v| v.is_finite());
    Ok(MaximaReport { m, z, truncation_radius: spec.extent, in_regularity_set })
}

/// Outcome of [`grid_invert`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridInversion {
    pub y: NodeConfig,
    /// `‖D(y) − d‖∞` with `D` computed on the lattice.
    pub residual: f64,
    /// Largest `‖·‖∞` distance from `y` to another lattice configuration
    /// with exactly the same residual.
    pub tie_spread: f64,
}

/// Values of `J` and of each kernel on a lattice; nodes are restricted to
/// lattice points, so `F(y, t_k) = J(t_k) + Σ Kⱼ((k − iⱼ)·step)` is a table
/// lookup and a scan costs one addition per kernel and point.
struct Lattice<'a> {
    problem: &'a Problem,
    spec: GridSpec,
    last: usize,
    field: Vec<f64>,
    /// `kernels[j][o]` is `Kⱼ((o − last)·step)`.
    kernels: Vec<Vec<f64>>,
    support: Option<Vec<f64>>,
}

impl<'a> Lattice<'a> {
    fn new(problem: &'a Problem, spec: GridSpec) -> Self {
        let last = spec.last_index();
        let support = problem.field().finite_support().map(|p| p.iter().map(|q| q.0).collect());
        let field = if support.is_some() {
            Vec::new()
        } else {
            (0..=last).map(|k| problem.field().value(spec.t(k))).collect()
        };
        let kernels = problem
            .kernels()
            .iter()
            .map(|kern| {
                (0..=2 * last)
                    .map(|o| kern.value((o as f64 - last as f64) * spec.step))
                    .collect()
            })
            .collect();
        Lattice { problem, spec, last, field, kernels, support }
    }

    fn index_of(&self, t: f64) -> usize {
        (((t + self.spec.extent) / self.spec.step).round().max(0.0) as usize).min(self.last)
    }

    fn maxima(&self, idx: &[usize]) -> Vec<f64> {
        let mut bounds = Vec::with_capacity(idx.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(idx);
        bounds.push(self.last);
        match &self.support {
            Some(points) => {
                let y: Vec<f64> = idx.iter().map(|&i| self.spec.t(i)).collect();
                bounds
                    .windows(2)
                    .map(|w| {
                        let (lo, hi) = (self.spec.t(w[0]), self.spec.t(w[1]));
                        let lo = if w[0] == 0 { f64::NEG_INFINITY } else { lo };
                        let hi = if w[1] == self.last { f64::INFINITY } else { hi };
                        points
                            .iter()
                            .filter(|&&x| lo <= x && x <= hi)
                            .map(|&x| self.problem.f_raw(&y, x))
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect()
            }
            None => bounds
                .windows(2)
                .map(|w| {
                    let mut best = f64::NEG_INFINITY;
                    for k in w[0]..=w[1] {
                        let mut v = self.field[k];
                        if v == f64::NEG_INFINITY {
                            continue;
                        }
                        for (table, &i) in self.kernels.iter().zip(idx) {
                            v += table[k + self.last - i];
                        }
                        best = best.max(v);
                    }
                    best
                })
                .collect(),
        }
    }

    fn residual(&self, idx: &[usize], target: &[f64]) -> f64 {
        let m = self.maxima(idx);
        if m.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        m.windows(2)
            .zip(target)
            .map(|(w, d)| (w[1] - w[0] - d).abs())
            .fold(0.0, f64::max)
    }

    /// Exhaustive search over strictly increasing index tuples drawn from
    /// the given inclusive ranges. Returns the best tuple (first in
    /// lexicographic order among equals), its residual, and all tuples tied
    /// with it.
    fn search(&self, ranges: &[(usize, usize)], target: &[f64]) -> (Vec<usize>, f64, Vec<Vec<usize>>) {
        let tuples: Vec<Vec<usize>> = match ranges {
            [(a, b)] => (*a..=*b).map(|i| vec![i]).collect(),
            [(a1, b1), (a2, b2)] => (*a1..=*b1)
                .flat_map(|i| (i.max(*a2 - 1) + 1..=*b2).map(move |j| vec![i, j]))
                .collect(),
            _ => unreachable!("grid search is limited to one or two nodes"),
        };
        let scored: Vec<f64> = tuples.par_iter().map(|t| self.residual(t, target)).collect();
        let mut best = 0;
        for (i, &r) in scored.iter().enumerate() {
            if r < scored[best] {
                best = i;
            }
        }
        let best_r = scored[best];
        let ties = tuples
            .iter()
            .zip(&scored)
            .filter(|(_, &r)| r == best_r)
            .map(|(t, _)| t.clone())
            .collect();
        (tuples[best].clone(), best_r, ties)
    }
}

/// Lattice points strictly inside the window, clamped to `[1, last − 1]`.
fn window(center: usize, half_width: usize, last: usize) -> (usize, usize) {
    (center.saturating_sub(half_width).max(1), (center + half_width).min(last - 1))
}

/// Brute-force inverse of the difference map for one or two nodes.
///
/// One node is searched over the whole lattice. Two nodes are searched
/// coarse-to-fine: all pairs at `64·step`, then windows of three coarse
/// steps around the incumbent at `16·step`, `4·step` and `step`, with the
/// maxima always taken on the lattice of the current level.
pub fn grid_invert(problem: &Problem, d_target: &[f64], spec: GridSpec) -> Result<GridInversion> {
    let n = problem.n();
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidInput(format!("grid inversion supports 1 or 2 nodes, got {n}")));
    }
    if d_target.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: d_target.len() });
    }

    let levels: Vec<f64> = if n == 1 {
        vec![spec.step]
    } else {
        [64.0, 16.0, 4.0, 1.0]
            .iter()
            .map(|f| f * spec.step)
            .filter(|s| 2.0 * spec.extent / s >= 16.0 || *s == spec.step)
            .collect()
    };

    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut result = None;
    for &step in &levels {
        let level = GridSpec::new(step, spec.extent)?;
        let lattice = Lattice::new(problem, level);
        if lattice.last < n + 1 {
            return Err(Error::InvalidInput("grid too coarse for the node count".into()));
        }
        let ranges: Vec<(usize, usize)> = match &incumbent {
            None => vec![(1, lattice.last - 1); n],
            Some((y, prev_step)) => {
                let half = (3.0 * prev_step / step).ceil() as usize;
                y.iter().map(|&v| window(lattice.index_of(v), half, lattice.last)).collect()
            }
        };
        let (best, residual, ties) = lattice.search(&ranges, d_target);
        let y: Vec<f64> = best.iter().map(|&i| level.t(i)).collect();
        let tie_spread = ties
            .iter()
            .map(|t| t.iter().zip(&best).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0) as f64 * step)
            .fold(0.0, f64::max);
        incumbent = Some((y.clone(), step));
        result = Some(GridInversion { y: NodeConfig::new(y)?, residual, tie_spread });
    }
    Ok(result.expect("at least one level"))
}
