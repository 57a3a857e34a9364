//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::{E, SQRT_2};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use translates::applications::{
    hermite_fejer_interpolate, log_concave_interpolate, semiaxis_solve, weighted_poly_ratio_map,
    InterpolationProblem,
};
use translates::hypotheses::{check_shift_inequalities, probe_divergence, DEFAULT_PROBE_LEVELS};
use translates::maxima::{local_maxima_with_radius, tail_bound};
use translates::oracle::{grid_invert, GridSpec};
use translates::solver::{equioscillate, invert_difference, SolveOptions, SolveResult};
use translates::{difference_map, local_maxima, Field, Kernel, NodeConfig, Problem};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn log_neg_abs() -> Problem {
    Problem::new(vec![Kernel::log_abs(1.0).unwrap()], Field::neg_abs(1.0).unwrap()).unwrap()
}

/// Log kernels with random weights in [0.5, 2] and the Gaussian field.
fn random_family(rng: &mut ChaCha8Rng, n: usize) -> Problem {
    let kernels = (0..n).map(|_| Kernel::log_abs(rng.gen_range(0.5..2.0)).unwrap()).collect();
    Problem::new(kernels, Field::neg_square(1.0).unwrap()).unwrap()
}

/// Strictly increasing nodes in [−1.5, 1.5] with gaps of at least 0.05.
fn random_nodes(rng: &mut ChaCha8Rng, n: usize) -> NodeConfig {
    loop {
        let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        y.sort_by(f64::total_cmp);
        if y.windows(2).all(|w| w[1] - w[0] >= 0.05) {
            return NodeConfig::new(y).unwrap();
        }
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c1() -> Outcome {
    let start = Instant::now();
    let e = equioscillate(&log_neg_abs(), &SolveOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let y = e.solve.y.as_slice()[0];
    let z: Vec<f64> = e.solve.maxima.z.iter().map(|z| z.unwrap()).collect();
    let pass = y.abs() <= 1e-8
        && (e.level + 1.0).abs() <= 1e-6
        && (z[0] + 1.0).abs() <= 1e-4
        && (z[1] - 1.0).abs() <= 1e-4
        && elapsed < Duration::from_secs(1);
    outcome(pass, format!("y={y:e} level={:.9} z={z:?} in {elapsed:?}", e.level))
}

fn c2() -> Outcome {
    let r = local_maxima(&log_neg_abs(), &NodeConfig::new(vec![0.5]).unwrap()).unwrap();
    let d = r.differences().unwrap().0[0];
    let m: Vec<f64> = r.m.iter().map(|v| v.to_f64()).collect();
    let pass = (d + 1.0).abs() <= 1e-6 && (m[0] + 0.5).abs() <= 1e-6 && (m[1] + 1.5).abs() <= 1e-6;
    outcome(pass, format!("D={d:.9} m={m:?}"))
}

fn c3() -> Outcome {
    let r = invert_difference(&log_neg_abs(), &[-1.0], &SolveOptions::default()).unwrap();
    let y = r.y.as_slice()[0];
    outcome((y - 0.5).abs() <= 1e-6, format!("y={y:.12}"))
}

/// Criteria 4 and 5 share the solves.
fn c4_c5() -> (Outcome, Outcome) {
    let start = Instant::now();
    let opts = SolveOptions { seed: 11, ..SolveOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    let mut min_converged = usize::MAX;
    let mut failures = Vec::new();

    let mut record_uniqueness = |r: &SolveResult| {
        worst_spread = worst_spread.max(r.start_spread());
        min_converged = min_converged.min(r.converged_starts());
    };

    for i in 0..100 {
        let n = 1 + i % 3;
        let p = random_family(&mut rng, n);
        let y = random_nodes(&mut rng, n);
        let d = difference_map(&p, &y).unwrap();
        match invert_difference(&p, d.as_slice(), &opts) {
            Ok(r) => {
                worst_a = worst_a.max(r.y.distance(&y));
                record_uniqueness(&r);
            }
            Err(e) => failures.push(format!("A{i}: {e}")),
        }
    }
    for i in 0..50 {
        let n = 1 + i % 4;
        let p = random_family(&mut rng, n);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        match invert_difference(&p, &d, &opts) {
            Ok(r) => {
                let back = difference_map(&p, &r.y).unwrap();
                worst_b = worst_b.max(back.distance(&d));
                record_uniqueness(&r);
            }
            Err(e) => failures.push(format!("B{i}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let c4 = outcome(
        failures.is_empty() && worst_a <= 1e-6 && worst_b <= 1e-8 && elapsed < Duration::from_secs(120),
        format!("max |Δy|={worst_a:.2e} max |Δd|={worst_b:.2e} in {elapsed:.1?} failures={failures:?}"),
    );
    let c5 = outcome(
        failures.is_empty() && worst_spread <= 1e-5 && min_converged == opts.starts,
        format!("max multistart spread={worst_spread:.2e}, fewest converged starts={min_converged}/{}", opts.starts),
    );
    (c4, c5)
}

fn c6() -> Outcome {
    let problem = |alpha: Vec<f64>| InterpolationProblem {
        x: Some(vec![-1.0, 1.0]),
        alpha,
        factors: vec![Kernel::log_abs(1.0).unwrap()],
        weight: Field::neg_abs(1.0).unwrap(),
    };
    let opts = SolveOptions::default();
    let a = log_concave_interpolate(&problem(vec![1.0, 1.0]), &opts).unwrap();
    let b = log_concave_interpolate(&problem(vec![1.0, 2.0]), &opts).unwrap();
    // (1 − y)/(1 + y) = 2 solved independently.
    let y_ref = bisect(|y| (1.0 - y) / (1.0 + y) - 2.0, -0.99, 0.99);
    let c_ref = 1.0 / ((-1.0f64).exp() * (1.0 + y_ref));
    let reconstruct = |r: &translates::applications::InterpolationResult, alpha: &[f64]| {
        r.achieved.iter().zip(alpha).all(|(g, a)| (g - a).abs() <= 1e-8 * a.max(1.0))
    };
    let pass = (a.c - E).abs() <= 1e-6
        && a.y.as_slice()[0].abs() <= 1e-8
        && (b.y.as_slice()[0] - y_ref).abs() <= 1e-5
        && (b.c - c_ref).abs() <= 1e-5
        && (c_ref - 1.5 * E).abs() <= 1e-12
        && reconstruct(&a, &[1.0, 1.0])
        && reconstruct(&b, &[1.0, 2.0]);
    outcome(
        pass,
        format!("C={:.9} y={:e}; C={:.9} y={:.9}", a.c, a.y.as_slice()[0], b.c, b.y.as_slice()[0]),
    )
}

fn c7() -> Outcome {
    let p = InterpolationProblem {
        x: None,
        alpha: vec![1.0, 1.0],
        factors: vec![Kernel::log_abs(1.0).unwrap()],
        weight: Field::neg_square(1.0).unwrap(),
    };
    let r = hermite_fejer_interpolate(&p, &SolveOptions::default()).unwrap();
    let z = r.z.clone().unwrap();
    // Stationary point of log t − t² on t > 0.
    let z_ref = bisect(|t| 1.0 / t - 2.0 * t, 0.1, 2.0);
    let c_ref = SQRT_2 * 0.5f64.exp();
    let y = r.y.as_slice()[0];
    let pass = y.abs() <= 1e-8
        && (z[0] + z_ref).abs() <= 1e-5
        && (z[1] - z_ref).abs() <= 1e-5
        && (r.c - c_ref).abs() <= 1e-5
        && z[0] < y
        && y < z[1];
    outcome(pass, format!("y={y:e} z={z:?} C={:.9}", r.c))
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let opts = SolveOptions::default();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..20 {
        let n = 1 + i % 2;
        let p = random_family(&mut rng, n);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let solved = match invert_difference(&p, &d, &opts) {
            Ok(r) => r.y,
            Err(e) => {
                failures.push(format!("{i}: {e}"));
                continue;
            }
        };
        let extent = tail_bound(&p, &solved, 1.0).unwrap().max(4.0);
        let grid = grid_invert(&p, &d, GridSpec::new(1e-3, extent).unwrap()).unwrap();
        worst = worst.max(grid.y.distance(&solved));
    }
    outcome(failures.is_empty() && worst <= 2e-3, format!("max |y_grid − y_solver|={worst:.2e} failures={failures:?}"))
}

fn c9() -> Outcome {
    let kernels = [
        ("log", Kernel::log_abs(1.0).unwrap()),
        ("log_linear", Kernel::log_abs_plus_linear(1.5, 0.7).unwrap()),
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for (i, (name, k)) in kernels.iter().enumerate() {
        let report = check_shift_inequalities(k, 1000, 900 + i as u64);
        pass &= report.is_clean() && report.tuples_checked >= 1000;
        details.push(format!("{name}: {} tuples, {} violations", report.tuples_checked, report.violations.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let field = Field::neg_square(1.0).unwrap();
    let ks = vec![Kernel::log_abs(1.0).unwrap(), Kernel::log_abs(2.0).unwrap()];
    let mut probes_ok = 0;
    for _ in 0..10 {
        let shifts: Vec<f64> = (0..2).map(|_| rng.gen_range(-5.0..5.0)).collect();
        if probe_divergence(&field, &ks, &shifts, DEFAULT_PROBE_LEVELS).admissible {
            probes_ok += 1;
        }
    }
    pass &= probes_ok == 10;
    details.push(format!("divergence probes {probes_ok}/10"));
    outcome(pass, details.join("; "))
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 1 + i % 4;
        let p = random_family(&mut rng, n);
        let y = random_nodes(&mut rng, n);
        let tau = tail_bound(&p, &y, p.search().tail_margin).unwrap();
        let a = local_maxima_with_radius(&p, &y, tau).unwrap();
        let b = local_maxima_with_radius(&p, &y, 2.0 * tau).unwrap();
        for (u, v) in a.m.iter().zip(&b.m) {
            if u.is_finite() {
                worst = worst.max((u.to_f64() - v.to_f64()).abs());
            }
        }
    }
    outcome(worst < 1e-9, format!("max change={worst:.2e}"))
}

fn c11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let weight = Field::neg_square(1.0).unwrap();
    let mut worst_rel: f64 = 0.0;
    for i in 0..50 {
        let n = 1 + i % 4;
        let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let y = random_nodes(&mut rng, n);
        let ratios = weighted_poly_ratio_map(&y, &weight, &r).unwrap();
        let kernels = r.iter().map(|&w| Kernel::log_abs(w).unwrap()).collect();
        let p = Problem::new(kernels, weight.clone()).unwrap();
        let d = difference_map(&p, &y).unwrap();
        for (q, dj) in ratios.iter().zip(d.as_slice()) {
            worst_rel = worst_rel.max((q - dj.exp()).abs() / dj.exp());
        }
    }

    let opts = SolveOptions::default();
    let kernels = vec![Kernel::log_abs(1.0).unwrap(), Kernel::log_abs(1.0).unwrap()];
    let mut worst_embed: f64 = 0.0;
    for d in [[-0.5, 0.3], [0.0, 0.0], [1.0, -1.0]] {
        let semi = semiaxis_solve(kernels.clone(), Field::neg_abs(1.0).unwrap(), &d, &opts).unwrap();
        // The same field written out by hand as −∞ on the negative axis.
        let extended = Problem::new(kernels.clone(), Field::restrict_semiaxis(Field::neg_abs(1.0).unwrap())).unwrap();
        let full = invert_difference(&extended, &d, &opts).unwrap();
        worst_embed = worst_embed.max(semi.y.distance(&full.y));
    }
    outcome(
        worst_rel <= 1e-9 && worst_embed <= 1e-10,
        format!("ratio map rel err={worst_rel:.2e}; semiaxis vs extended={worst_embed:.2e}"),
    )
}

fn main() {
    let mut results: Vec<(u32, Outcome)> = vec![(1, c1()), (2, c2()), (3, c3())];
    let (c4, c5) = c4_c5();
    results.push((4, c4));
    results.push((5, c5));
    results.push((6, c6()));
    results.push((7, c7()));
    results.push((8, c8()));
    results.push((9, c9()));
    results.push((10, c10()));
    results.push((11, c11()));
    // Global invertibility is a topological statement; it is covered by the
    // round-trip, uniqueness and grid-oracle criteria above.
    let substitutes = results.iter().filter(|(i, _)| [4, 5, 8].contains(i)).all(|(_, o)| o.pass);
    results.push((12, outcome(substitutes, "not reproducible directly; substitutes 4, 5, 8")));

    let mut all = true;
    for (i, o) in &results {
        all &= o.pass;
        println!("criterion {i:>2}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
