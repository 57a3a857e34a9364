//! Local maxima of a sum of translates and the difference map.
//!
//! The nodes cut the axis into `n + 1` closed intervals
//! `(−∞, y₁], [y₁, y₂], …, [yₙ, ∞)`. `m_j` is the supremum of `F(y, ·)` on
//! interval `j`. The unbounded end intervals are truncated at a tail bound
//! beyond which `F` is known (by sampling) to stay well below the interval's
//! best value, so the truncated suprema coincide with the true ones.
//!
//! Continuous fields are searched without any unimodality assumption: a
//! coarse grid locates candidate peaks and the best few are refined by
//! golden section. Field breakpoints inside an interval are evaluated
//! exactly. Discrete fields are maximized exactly over their support.

use std::io::Write;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::golden;
use crate::numfmt::format_sig;
use crate::problem::{NodeConfig, Problem};

/// Reference samples per side when estimating the end-interval level.
const TAIL_REFERENCE_SAMPLES: usize = 512;
/// Probes per side in `[τ, 4τ]`.
const TAIL_PROBES: usize = 256;
/// The doubling scan gives up past this radius.
const TAIL_LIMIT: f64 = 1_099_511_627_776.0; // 2^40

#[derive(Debug, Clone, PartialEq)]
pub struct MaximaReport {
    /// `m₀, …, mₙ`
    pub m: Vec<ExtReal>,
    /// Location of the best value found per interval; `None` where `m_j = −∞`.
    pub z: Vec<Option<f64>>,
    /// Radius at which the end intervals were truncated.
    pub truncation_radius: f64,
    pub in_regularity_set: bool,
}

impl MaximaReport {
    fn new(m: Vec<ExtReal>, z: Vec<Option<f64>>, truncation_radius: f64) -> Self {
        let in_regularity_set = m.iter().all(|v| v.is_finite());
        MaximaReport { m, z, truncation_radius, in_regularity_set }
    }

    /// First interval whose supremum is `−∞`.
    pub fn first_singular_interval(&self) -> Option<usize> {
        self.m.iter().position(|v| v.is_neg_infinity())
    }

    /// `(m_j − m_{j−1})_{j=1..n}`; errors outside the regularity set.
    pub fn differences(&self) -> Result<DifferenceVector> {
        if let Some(index) = self.first_singular_interval() {
            return Err(Error::NotInRegularitySet { index });
        }
        let m: Vec<f64> = self.m.iter().map(|v| v.to_f64()).collect();
        Ok(DifferenceVector(m.windows(2).map(|w| w[1] - w[0]).collect()))
    }

    /// `mₙ − m₀`, when both are finite.
    pub fn span(&self) -> Option<f64> {
        let first = self.m.first()?.value()?;
        let last = self.m.last()?.value()?;
        Some(last - first)
    }
}

/// `d ∈ ℝⁿ` with `d_j = m_j − m_{j−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceVector(pub Vec<f64>);

impl DifferenceVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `‖self − other‖∞`
    pub fn distance(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Tail radius `τ > max(|y₁|, |yₙ|) + 1` such that every probe `t` with
/// `|t| ∈ [τ, 4τ]` has `F(y, t)` at least `margin` below the best sampled
/// level of its end interval (or `F = −∞`). Found by doubling from
/// `max(|y₁|, |yₙ|) + 1`.
pub fn tail_bound(problem: &Problem, y: &NodeConfig, margin: f64) -> Result<f64> {
    problem.check_dimension(y)?;
    if !(margin >= 1.0 && margin.is_finite()) {
        return Err(Error::InvalidInput(format!("tail margin must be >= 1, got {margin}")));
    }
    let nodes = y.as_slice();
    let first = nodes[0];
    let last = nodes[nodes.len() - 1];
    let base = first.abs().max(last.abs()) + 1.0;

    if let Some(support) = problem.field().finite_support() {
        let reach = support.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
        return Ok(base.max(reach + 1.0));
    }

    let mut tau = base;
    while tau <= TAIL_LIMIT {
        if tail_side_ok(problem, nodes, tau, margin, -1.0) && tail_side_ok(problem, nodes, tau, margin, 1.0) {
            return Ok(tau);
        }
        tau *= 2.0;
    }
    Err(Error::AdmissibilityViolated)
}

fn tail_side_ok(problem: &Problem, y: &[f64], tau: f64, margin: f64, dir: f64) -> bool {
    let f = |t: f64| problem.f_raw(y, t);
    let guard = problem.search().node_guard;
    let (a, b) = if dir < 0.0 {
        (-tau, y[0] - guard)
    } else {
        (y[y.len() - 1] + guard, tau)
    };
    let mut reference = f64::NEG_INFINITY;
    if a < b {
        for i in 0..TAIL_REFERENCE_SAMPLES {
            let t = a + (b - a) * i as f64 / (TAIL_REFERENCE_SAMPLES - 1) as f64;
            reference = reference.max(f(t));
        }
        for bp in problem.field().breakpoints() {
            if bp >= a && bp <= b {
                reference = reference.max(f(bp));
            }
        }
    }
    (0..TAIL_PROBES).all(|i| {
        let s = tau + 3.0 * tau * i as f64 / (TAIL_PROBES - 1) as f64;
        let v = f(dir * s);
        v == f64::NEG_INFINITY || v <= reference - margin
    })
}

/// Local maxima with the end intervals truncated at
/// `tail_bound(problem, y, search.tail_margin)`.
pub fn local_maxima(problem: &Problem, y: &NodeConfig) -> Result<MaximaReport> {
    problem.check_dimension(y)?;
    if problem.field().is_discrete() {
        return Ok(discrete_maxima(problem, y));
    }
    let tau = tail_bound(problem, y, problem.search().tail_margin)?;
    Ok(continuous_maxima(problem, y.as_slice(), tau))
}

/// Local maxima with an explicit truncation radius for the end intervals.
/// The radius is widened to cover the nodes if necessary.
pub fn local_maxima_with_radius(problem: &Problem, y: &NodeConfig, radius: f64) -> Result<MaximaReport> {
    problem.check_dimension(y)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    if problem.field().is_discrete() {
        return Ok(discrete_maxima(problem, y));
    }
    let nodes = y.as_slice();
    let tau = radius.max(nodes[0].abs()).max(nodes[nodes.len() - 1].abs());
    Ok(continuous_maxima(problem, nodes, tau))
}

fn discrete_maxima(problem: &Problem, y: &NodeConfig) -> MaximaReport {
    let support = problem.field().finite_support().expect("discrete field");
    let nodes = y.as_slice();
    let n = nodes.len();
    let tau = tail_bound(problem, y, 1.0).expect("discrete tail bound is closed-form");
    let mut m = Vec::with_capacity(n + 1);
    let mut z = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let lo = if j == 0 { f64::NEG_INFINITY } else { nodes[j - 1] };
        let hi = if j == n { f64::INFINITY } else { nodes[j] };
        let mut best = (None, f64::NEG_INFINITY);
        for &(x, _) in support.iter().filter(|p| p.0 >= lo && p.0 <= hi) {
            let v = problem.f_raw(nodes, x);
            if v > best.1 {
                best = (Some(x), v);
            }
        }
        m.push(ExtReal::from_f64(best.1));
        z.push(best.0);
    }
    MaximaReport::new(m, z, tau)
}

fn continuous_maxima(problem: &Problem, nodes: &[f64], tau: f64) -> MaximaReport {
    let n = nodes.len();
    let mut m = Vec::with_capacity(n + 1);
    let mut z = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (a, guard_a) = if j == 0 {
            (-tau, false)
        } else {
            (nodes[j - 1], problem.kernels()[j - 1].is_singular())
        };
        let (b, guard_b) = if j == n {
            (tau, false)
        } else {
            (nodes[j], problem.kernels()[j].is_singular())
        };
        let (v, t) = search_interval(problem, nodes, a, b, guard_a, guard_b);
        m.push(ExtReal::from_f64(v));
        z.push(v.is_finite().then_some(t));
    }
    MaximaReport::new(m, z, tau)
}

/// Supremum of `F(y, ·)` on `[a, b]`, returned as `(value, location)`.
fn search_interval(problem: &Problem, y: &[f64], a: f64, b: f64, guard_a: bool, guard_b: bool) -> (f64, f64) {
    let opts = problem.search();
    let f = |t: f64| problem.f_raw(y, t);

    let mut best = (f(a), a);
    let consider = |best: &mut (f64, f64), t: f64, v: f64| {
        if v > best.0 {
            *best = (v, t);
        }
    };
    let fb = f(b);
    consider(&mut best, b, fb);

    let lo = if guard_a { a + opts.node_guard } else { a };
    let hi = if guard_b { b - opts.node_guard } else { b };
    if hi <= lo {
        let mid = 0.5 * (a + b);
        consider(&mut best, mid, f(mid));
        return best;
    }

    let count = opts.grid_density.max(3);
    let step = (hi - lo) / (count - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..count)
        .map(|i| {
            let t = if i == count - 1 { hi } else { lo + step * i as f64 };
            (t, f(t))
        })
        .collect();

    // Grid peaks, best first.
    let mut peaks: Vec<usize> = (0..count)
        .filter(|&i| {
            let v = grid[i].1;
            v.is_finite()
                && (i == 0 || v >= grid[i - 1].1)
                && (i == count - 1 || v >= grid[i + 1].1)
        })
        .collect();
    peaks.sort_by(|&i, &k| grid[k].1.total_cmp(&grid[i].1).then(i.cmp(&k)));

    for &(t, v) in &grid {
        consider(&mut best, t, v);
    }
    for &i in peaks.iter().take(opts.refine_candidates) {
        let left = grid[i.saturating_sub(1)].0;
        let right = grid[(i + 1).min(count - 1)].0;
        let (t, v) = golden::maximize(f, left, right, opts.t_tol);
        consider(&mut best, t, v);
    }
    for bp in problem.field().breakpoints() {
        if bp >= lo && bp <= hi {
            consider(&mut best, bp, f(bp));
        }
    }
    best
}

/// `D(y) = (m₁ − m₀, …, mₙ − mₙ₋₁)`.
pub fn difference_map(problem: &Problem, y: &NodeConfig) -> Result<DifferenceVector> {
    local_maxima(problem, y)?.differences()
}

pub fn in_regularity_set(problem: &Problem, y: &NodeConfig) -> Result<bool> {
    Ok(local_maxima(problem, y)?.in_regularity_set)
}

/// Writes `count` samples of `F(y, ·)` on `[lo, hi]` as CSV with header
/// `t,F`. `−∞` is written as `-inf`.
pub fn write_profile<W: Write>(
    problem: &Problem,
    y: &NodeConfig,
    lo: f64,
    hi: f64,
    count: usize,
    out: &mut W,
) -> Result<()> {
    problem.check_dimension(y)?;
    if count == 0 || lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidInput("profile needs count >= 1 and lo <= hi".into()));
    }
    let io = |e: std::io::Error| Error::InvalidInput(format!("profile write failed: {e}"));
    writeln!(out, "t,F").map_err(io)?;
    for i in 0..count {
        let t = if count == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        };
        let v = problem.f_raw(y.as_slice(), t);
        writeln!(out, "{},{}", format_sig(t, 9), format_sig(v, 9)).map_err(io)?;
    }
    Ok(())
}
