//! Numerical inversion of the difference map.
//!
//! `G(y) = D(y) − d` is driven to zero by a damped quasi-Newton iteration
//! with a forward-difference Jacobian and a backtracking line search on
//! `‖G‖∞`. Iterates are kept strictly ordered so they never reach the
//! boundary of the regularity set through node collisions. Several start
//! points are run independently; if none converges, a homotopy from the
//! image of the first start to the target is followed.
//!
//! Uniqueness of the preimage means every converged start should land on
//! the same configuration, which [`SolveResult::start_spread`] exposes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maxima::{self, DifferenceVector, MaximaReport};
use crate::problem::{NodeConfig, Problem};

/// Minimum gap kept between consecutive nodes.
pub const ORDER_GAP: f64 = 1e-10;
/// Relative forward-difference step.
const FD_STEP: f64 = 1e-6;
const MAX_HALVINGS: usize = 40;
/// Extra Newton steps taken after reaching the tolerance, kept only when
/// they reduce the residual.
const POLISH_STEPS: usize = 2;
/// Points of the proxy-mass grid used for start placement.
const MASS_GRID: usize = 4096;
/// Start jitter as a fraction of the smaller neighbouring gap.
const JITTER: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, max_iter: 200, starts: 10, seed: 0 }
    }
}

/// What happened to one start point.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub start: NodeConfig,
    pub y: NodeConfig,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub y: NodeConfig,
    pub d_achieved: DifferenceVector,
    pub maxima: MaximaReport,
    /// `‖D(y) − d_target‖∞`
    pub residual: f64,
    pub iterations: usize,
    pub starts_used: usize,
    pub converged: bool,
    pub used_homotopy: bool,
    pub start_outcomes: Vec<StartOutcome>,
}

impl SolveResult {
    /// Largest `‖·‖∞` distance between any two converged starts.
    pub fn start_spread(&self) -> f64 {
        let ys: Vec<&NodeConfig> = self.start_outcomes.iter().filter(|o| o.converged).map(|o| &o.y).collect();
        let mut spread: f64 = 0.0;
        for (i, a) in ys.iter().enumerate() {
            for b in &ys[i + 1..] {
                spread = spread.max(a.distance(b));
            }
        }
        spread
    }

    pub fn converged_starts(&self) -> usize {
        self.start_outcomes.iter().filter(|o| o.converged).count()
    }
}

/// Finds `y` in the regularity set with `D(y) = d_target`.
pub fn invert_difference(problem: &Problem, d_target: &[f64], opts: &SolveOptions) -> Result<SolveResult> {
    let n = problem.n();
    if d_target.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: d_target.len() });
    }
    if d_target.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidInput("target must be finite".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    problem.require_main_hypotheses()?;

    let starts = start_points(problem, opts.starts.max(1), opts.seed)?;
    let outcomes: Vec<StartOutcome> = starts
        .par_iter()
        .map(|s| newton(problem, s.clone(), d_target, opts))
        .collect();

    let best_converged = outcomes
        .iter()
        .filter(|o| o.converged)
        .min_by(|a, b| canonical_order(a, b));

    let (y, iterations, used_homotopy) = match best_converged {
        Some(o) => (o.y.clone(), o.iterations, false),
        None => match homotopy(problem, &starts[0], d_target, opts) {
            Some(o) if o.converged => (o.y, o.iterations, true),
            _ => {
                let best = outcomes
                    .iter()
                    .min_by(|a, b| canonical_order(a, b))
                    .expect("at least one start");
                return Err(Error::SolverFailed {
                    best_residual: best.residual,
                    best_y: best.y.as_slice().to_vec(),
                });
            }
        },
    };

    let maxima = maxima::local_maxima(problem, &y)?;
    let d_achieved = maxima.differences()?;
    let residual = d_achieved.distance(d_target);
    Ok(SolveResult {
        y,
        d_achieved,
        maxima,
        residual,
        iterations,
        starts_used: starts.len(),
        converged: residual <= opts.tol,
        used_homotopy,
        start_outcomes: outcomes,
    })
}

/// Smallest residual first, ties broken lexicographically on `y`.
fn canonical_order(a: &StartOutcome, b: &StartOutcome) -> std::cmp::Ordering {
    a.residual.total_cmp(&b.residual).then_with(|| {
        a.y.as_slice()
            .iter()
            .zip(b.y.as_slice())
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Result of [`equioscillate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Equioscillation {
    pub solve: SolveResult,
    /// Common value of the local maxima (their mean).
    pub level: f64,
    /// `max_j m_j − min_j m_j`
    pub spread: f64,
}

/// Solves `D(y) = 0`: all local maxima equal.
pub fn equioscillate(problem: &Problem, opts: &SolveOptions) -> Result<Equioscillation> {
    let solve = invert_difference(problem, &vec![0.0; problem.n()], opts)?;
    let m: Vec<f64> = solve.maxima.m.iter().map(|v| v.to_f64()).collect();
    let level = m.iter().sum::<f64>() / m.len() as f64;
    let spread = m.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - m.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Equioscillation { solve, level, spread })
}

fn residual_at(problem: &Problem, y: &NodeConfig, target: &[f64]) -> Option<(Vec<f64>, f64)> {
    let d = maxima::difference_map(problem, y).ok()?;
    let g: Vec<f64> = d.0.iter().zip(target).map(|(a, b)| a - b).collect();
    let r = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    r.is_finite().then_some((g, r))
}

/// Enforces `y_{k+1} ≥ y_k + ORDER_GAP` by a left-to-right sweep.
fn project(mut y: Vec<f64>) -> Option<NodeConfig> {
    for k in 1..y.len() {
        let floor = y[k - 1] + ORDER_GAP.max(ORDER_GAP * y[k - 1].abs());
        if y[k] < floor {
            y[k] = floor;
        }
    }
    NodeConfig::new(y).ok()
}

fn jacobian(problem: &Problem, y: &NodeConfig, g: &[f64], target: &[f64]) -> Option<DMatrix<f64>> {
    let n = y.len();
    let nodes = y.as_slice();
    let scale = nodes.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let h = FD_STEP * scale;
    let mut jac = DMatrix::zeros(n, n);
    for k in 0..n {
        let column = [h, -h].iter().find_map(|&step| {
            let mut moved = nodes.to_vec();
            moved[k] += step;
            let ordered = (k == 0 || moved[k] > moved[k - 1] + ORDER_GAP)
                && (k + 1 == n || moved[k] < moved[k + 1] - ORDER_GAP);
            if !ordered {
                return None;
            }
            let (gk, _) = residual_at(problem, &NodeConfig::new(moved).ok()?, target)?;
            Some(gk.iter().zip(g).map(|(a, b)| (a - b) / step).collect::<Vec<f64>>())
        })?;
        for (i, v) in column.into_iter().enumerate() {
            jac[(i, k)] = v;
        }
    }
    Some(jac)
}

/// Damped quasi-Newton from one start.
fn newton(problem: &Problem, start: NodeConfig, target: &[f64], opts: &SolveOptions) -> StartOutcome {
    let Some((mut g, mut r)) = residual_at(problem, &start, target) else {
        return StartOutcome { y: start.clone(), start, residual: f64::INFINITY, iterations: 0, converged: false };
    };
    let mut y = start.clone();
    let mut polish_left = POLISH_STEPS;
    let mut steps = 0;
    while steps < opts.max_iter {
        if r <= opts.tol {
            if polish_left == 0 || r == 0.0 {
                break;
            }
            polish_left -= 1;
        }
        let Some(step) = newton_step(problem, &y, &g, target) else {
            break;
        };
        match line_search(problem, &y, &step, r, target) {
            Some((ny, ng, nr)) => {
                y = ny;
                g = ng;
                r = nr;
                steps += 1;
            }
            None => break,
        }
    }
    StartOutcome { start, y, residual: r, iterations: steps, converged: r <= opts.tol }
}

fn newton_step(problem: &Problem, y: &NodeConfig, g: &[f64], target: &[f64]) -> Option<Vec<f64>> {
    let jac = jacobian(problem, y, g, target)?;
    let rhs = -DVector::from_column_slice(g);
    let delta = jac.lu().solve(&rhs)?;
    let delta: Vec<f64> = delta.iter().copied().collect();
    delta.iter().all(|v| v.is_finite()).then_some(delta)
}

/// Halves the step until `‖G‖∞` decreases. The first trial is capped so a
/// single step never moves a node by more than the current spread + 1.
fn line_search(
    problem: &Problem,
    y: &NodeConfig,
    step: &[f64],
    r: f64,
    target: &[f64],
) -> Option<(NodeConfig, Vec<f64>, f64)> {
    let nodes = y.as_slice();
    let spread = nodes[nodes.len() - 1] - nodes[0] + 1.0;
    let longest = step.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut lambda = if longest > spread { spread / longest } else { 1.0 };
    for _ in 0..MAX_HALVINGS {
        let trial: Vec<f64> = nodes.iter().zip(step).map(|(a, s)| a + lambda * s).collect();
        if let Some(candidate) = project(trial) {
            if let Some((g, nr)) = residual_at(problem, &candidate, target) {
                if nr < r {
                    return Some((candidate, g, nr));
                }
            }
        }
        lambda *= 0.5;
    }
    None
}

/// Follows targets `(1 − s)·D(y⁰) + s·d` from `s = 0` to `1`, warm-starting
/// each leg and halving the increment of `s` when a leg fails.
fn homotopy(problem: &Problem, start: &NodeConfig, target: &[f64], opts: &SolveOptions) -> Option<StartOutcome> {
    let d0 = maxima::difference_map(problem, start).ok()?;
    let mut y = start.clone();
    let mut s: f64 = 0.0;
    let mut ds: f64 = 0.1;
    let mut total_iter = 0;
    while s < 1.0 {
        let next = (s + ds).min(1.0);
        let leg: Vec<f64> = d0.0.iter().zip(target).map(|(a, b)| (1.0 - next) * a + next * b).collect();
        let out = newton(problem, y.clone(), &leg, opts);
        total_iter += out.iterations;
        if out.converged {
            y = out.y;
            s = next;
            ds = (ds * 2.0).min(0.1);
        } else {
            ds *= 0.5;
            if ds < 1e-3 {
                return None;
            }
        }
    }
    let (_, r) = residual_at(problem, &y, target)?;
    Some(StartOutcome {
        start: start.clone(),
        y,
        residual: r,
        iterations: total_iter,
        converged: r <= opts.tol,
    })
}

/// Start configurations for the multi-start solver.
///
/// Discrete fields: node `k` goes into the gap between support points
/// `g_k − 1` and `g_k` with `g_k = ⌊k·|supp| / (n+1)⌋`, so every interval
/// keeps a support point. Continuous fields: nodes sit at the
/// `k/(n+1)`-quantiles of the proxy mass `exp(J − sup J)` on `[−τ, τ]`.
/// Start 0 is unjittered; later starts are jittered by the seeded RNG.
pub fn start_points(problem: &Problem, count: usize, seed: u64) -> Result<Vec<NodeConfig>> {
    let n = problem.n();
    let mut out = Vec::with_capacity(count);
    if let Some(support) = problem.field().finite_support() {
        let xs: Vec<f64> = support.iter().map(|p| p.0).collect();
        let gaps: Vec<usize> = (1..=n).map(|k| k * xs.len() / (n + 1)).collect();
        for s in 0..count {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
            let y: Vec<f64> = gaps
                .iter()
                .map(|&g| {
                    let frac = if s == 0 { 0.5 } else { rng.gen_range(0.1..0.9) };
                    xs[g - 1] + frac * (xs[g] - xs[g - 1])
                })
                .collect();
            out.push(NodeConfig::new(y)?);
        }
        return Ok(out);
    }

    let zeros = NodeConfig::new(vec![0.0; n])?;
    let tau = maxima::tail_bound(problem, &zeros, 2.0)?;
    let upper = problem.field().upper_bound();
    let grid: Vec<f64> = (0..MASS_GRID)
        .map(|i| -tau + 2.0 * tau * i as f64 / (MASS_GRID - 1) as f64)
        .collect();
    let mass: Vec<f64> = grid.iter().map(|&t| (problem.field().value(t) - upper).exp()).collect();
    let mut cdf = Vec::with_capacity(MASS_GRID);
    let mut acc = 0.0;
    for w in mass.windows(2) {
        acc += 0.5 * (w[0] + w[1]);
        cdf.push(acc);
    }
    let total = acc;
    let quantile = |q: f64| -> f64 {
        if total <= 0.0 {
            return -tau + 2.0 * tau * q;
        }
        let level = q * total;
        let i = cdf.partition_point(|&c| c < level);
        let prev = if i == 0 { 0.0 } else { cdf[i - 1] };
        let width = cdf[i] - prev;
        let frac = if width > 0.0 { (level - prev) / width } else { 0.5 };
        grid[i] + frac * (grid[i + 1] - grid[i])
    };
    let base: Vec<f64> = (1..=n).map(|k| quantile(k as f64 / (n + 1) as f64)).collect();
    let lower = problem.field().support_lower_limit().max(-tau);

    for s in 0..count {
        let y = if s == 0 {
            base.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
            (0..n)
                .map(|k| {
                    let left = if k == 0 { base[0] - lower } else { base[k] - base[k - 1] };
                    let right = if k + 1 == n { tau - base[k] } else { base[k + 1] - base[k] };
                    base[k] + rng.gen_range(-JITTER..JITTER) * left.min(right)
                })
                .collect()
        };
        let y = project(y).ok_or_else(|| Error::InvalidInput("start point construction failed".into()))?;
        out.push(y);
    }
    Ok(out)
}

/// Sampled local Lipschitz constants of `D` and its inverse around `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzProbe {
    /// Smallest observed `‖D(y′) − D(y″)‖∞ / ‖y′ − y″‖∞`.
    pub lower: f64,
    /// Largest observed ratio.
    pub upper: f64,
    pub pairs_used: usize,
    pub samples_skipped: usize,
}

/// Samples pairs in the `‖·‖∞` ball of the given radius and reports the
/// extreme difference quotients of `D`. Samples outside the regularity set
/// are skipped and counted.
pub fn local_lipschitz_probe(
    problem: &Problem,
    y: &NodeConfig,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<LipschitzProbe> {
    problem.check_dimension(y)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::DegenerateBall);
    }
    if !maxima::in_regularity_set(problem, y)? {
        return Err(Error::BallLeavesRegularitySet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strict = problem.all_singular();
    let draw = |rng: &mut ChaCha8Rng| -> Option<(NodeConfig, DifferenceVector)> {
        let v: Vec<f64> = y.as_slice().iter().map(|c| c + rng.gen_range(-radius..radius)).collect();
        let cfg = NodeConfig::new(v).ok()?;
        if strict && !cfg.is_strictly_increasing() {
            return None;
        }
        let d = maxima::difference_map(problem, &cfg).ok()?;
        Some((cfg, d))
    };
    let (mut lower, mut upper) = (f64::INFINITY, 0.0f64);
    let (mut used, mut skipped) = (0, 0);
    for _ in 0..samples {
        let (Some((a, da)), Some((b, db))) = (draw(&mut rng), draw(&mut rng)) else {
            skipped += 1;
            continue;
        };
        let dy = a.distance(&b);
        if dy == 0.0 {
            skipped += 1;
            continue;
        }
        let ratio = da.distance(db.as_slice()) / dy;
        lower = lower.min(ratio);
        upper = upper.max(ratio);
        used += 1;
    }
    if used == 0 {
        return Err(Error::BallLeavesRegularitySet);
    }
    Ok(LipschitzProbe { lower, upper, pairs_used: used, samples_skipped: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::kernel::{Kernel, TableKernel};

    fn log_neg_abs() -> Problem {
        Problem::new(vec![Kernel::log_abs(1.0).unwrap()], Field::neg_abs(1.0).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_target_gives_origin() {
        let r = invert_difference(&log_neg_abs(), &[0.0], &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.y.as_slice()[0].abs() < 1e-8, "{:?}", r.y);
        assert!(r.residual <= 1e-8);
    }

    #[test]
    fn inverts_closed_form_difference() {
        let r = invert_difference(&log_neg_abs(), &[-1.0], &SolveOptions::default()).unwrap();
        assert!((r.y.as_slice()[0] - 0.5).abs() < 1e-6, "{:?}", r.y);
        assert!(r.start_spread() < 1e-5);
    }

    #[test]
    fn shifted_field_equioscillation() {
        let p = log_neg_abs().shifted_field(1.0).unwrap();
        let e = equioscillate(&p, &SolveOptions::default()).unwrap();
        assert!((e.solve.y.as_slice()[0] - 1.0).abs() < 1e-7);
        assert!((e.level + 1.0).abs() < 1e-6);
        assert!(e.spread <= 2e-8);
    }

    #[test]
    fn rejects_non_gm_kernel() {
        let t = TableKernel::new(
            vec![(-2.0, -2.0), (-1.0, -1.0)],
            vec![(1.0, -1.0), (2.0, -2.0)],
            Some((1.0, -1.0)),
            None,
        )
        .unwrap();
        let p = Problem::new(vec![Kernel::table(t, false)], Field::neg_square(1.0).unwrap()).unwrap();
        assert!(matches!(
            invert_difference(&p, &[0.0], &SolveOptions::default()),
            Err(Error::HypothesesUnmet(_))
        ));
    }

    #[test]
    fn rejects_inadmissible_field_and_bad_targets() {
        let p = Problem::new(
            vec![Kernel::log_abs(1.0).unwrap()],
            Field::log_weight_table(vec![(0.0, 0.0)]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            invert_difference(&p, &[0.0], &SolveOptions::default()),
            Err(Error::HypothesesUnmet(_))
        ));
        let q = log_neg_abs();
        assert!(matches!(
            invert_difference(&q, &[0.0, 1.0], &SolveOptions::default()),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
        assert!(invert_difference(&q, &[f64::NAN], &SolveOptions::default()).is_err());
    }

    #[test]
    fn start_points_are_ordered_and_regular() {
        let p = Problem::new(vec![Kernel::log_abs(1.0).unwrap(); 3], Field::neg_square(1.0).unwrap()).unwrap();
        let starts = start_points(&p, 10, 5).unwrap();
        assert_eq!(starts.len(), 10);
        for s in &starts {
            assert!(s.is_strictly_increasing());
            assert!(maxima::in_regularity_set(&p, s).unwrap());
        }
        // Start 0 is symmetric for an even field.
        let s0 = starts[0].as_slice();
        assert!((s0[0] + s0[2]).abs() < 1e-9 && s0[1].abs() < 1e-9);
    }

    #[test]
    fn discrete_start_points_interlace_support() {
        let p = Problem::new(
            vec![Kernel::log_abs(1.0).unwrap(); 2],
            Field::discrete(vec![(-1.0, 0.0), (0.0, 0.0), (2.0, 0.0)]).unwrap(),
        )
        .unwrap();
        for s in start_points(&p, 5, 1).unwrap() {
            let y = s.as_slice();
            assert!(-1.0 < y[0] && y[0] < 0.0 && 0.0 < y[1] && y[1] < 2.0, "{y:?}");
        }
    }

    #[test]
    fn lipschitz_probe() {
        let p = log_neg_abs();
        let y = NodeConfig::new(vec![0.5]).unwrap();
        let probe = local_lipschitz_probe(&p, &y, 0.05, 200, 1).unwrap();
        assert!(probe.lower > 0.0 && probe.upper.is_finite());
        assert!(probe.lower <= probe.upper);
        assert_eq!(local_lipschitz_probe(&p, &y, 0.0, 10, 1), Err(Error::DegenerateBall));

        let p2 = Problem::new(vec![Kernel::log_abs(1.0).unwrap(); 2], Field::neg_abs(1.0).unwrap()).unwrap();
        let y2 = NodeConfig::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(local_lipschitz_probe(&p2, &y2, 0.1, 10, 1), Err(Error::BallLeavesRegularitySet));
    }

    #[test]
    fn projection_restores_order() {
        let y = project(vec![0.0, -1.0, 3.0]).unwrap();
        assert!(y.is_strictly_increasing());
        assert_eq!(y.as_slice()[2], 3.0);
    }
}
