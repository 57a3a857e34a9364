use proptest::prelude::*;

use translates::applications::{
    log_concave_interpolate, semiaxis_problem, semiaxis_solve, weighted_poly_ratio_map, InterpolationProblem,
};
use translates::hypotheses::{
    across_origin_shift_holds, check_sampled_concavity, is_admissible, probe_divergence, same_side_shift_holds,
    DEFAULT_PROBE_LEVELS,
};
use translates::maxima::{local_maxima_with_radius, tail_bound};
use translates::oracle::{grid_invert, grid_local_maxima, GridSpec};
use translates::solver::{equioscillate, invert_difference, local_lipschitz_probe, SolveOptions};
use translates::{difference_map, local_maxima, Field, Kernel, NodeConfig, Problem};

fn built_in_kernel() -> impl Strategy<Value = Kernel> {
    prop_oneof![
        (0.2f64..3.0).prop_map(|w| Kernel::log_abs(w).unwrap()),
        (0.2f64..3.0, -2.0f64..2.0).prop_map(|(w, c)| Kernel::log_abs_plus_linear(w, c).unwrap()),
    ]
}

fn continuous_field() -> impl Strategy<Value = Field> {
    prop_oneof![
        (0.5f64..2.0).prop_map(|a| Field::neg_abs(a).unwrap()),
        (0.5f64..2.0).prop_map(|a| Field::neg_square(a).unwrap()),
        ((0.5f64..2.0), (-1.0f64..1.0)).prop_map(|(a, c)| Field::shifted(Field::neg_square(a).unwrap(), c).unwrap()),
    ]
}

/// Log kernels with weights in [0.5, 2] and the Gaussian field.
fn family(max_n: usize) -> impl Strategy<Value = Problem> {
    prop::collection::vec(0.5f64..2.0, 1..=max_n).prop_map(|w| {
        let kernels = w.into_iter().map(|w| Kernel::log_abs(w).unwrap()).collect();
        Problem::new(kernels, Field::neg_square(1.0).unwrap()).unwrap()
    })
}

/// Strictly increasing nodes in [−1.5, 1.5], at least 0.02 apart.
fn spread_nodes(n: usize) -> impl Strategy<Value = NodeConfig> {
    prop::collection::vec(-1.5f64..1.5, n)
        .prop_map(|mut v| {
            v.sort_by(f64::total_cmp);
            v
        })
        .prop_filter("nodes too close", |v| v.windows(2).all(|w| w[1] - w[0] >= 0.02))
        .prop_map(|v| NodeConfig::new(v).unwrap())
}

fn problem_and_nodes(max_n: usize) -> impl Strategy<Value = (Problem, NodeConfig)> {
    family(max_n).prop_flat_map(|p| {
        let n = p.n();
        (Just(p), spread_nodes(n))
    })
}

fn m_values(p: &Problem, y: &NodeConfig) -> Vec<f64> {
    local_maxima(p, y).unwrap().m.iter().map(|v| v.to_f64()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_concave_on_each_side(k in built_in_kernel(), seed in any::<u64>()) {
        prop_assert!(check_sampled_concavity(&k, 2000, seed).is_empty());
    }

    #[test]
    fn gm_slope_limits_are_finite(k in built_in_kernel()) {
        let s = k.slope_limits().unwrap();
        prop_assert!(s.gm_holds);
        prop_assert!(s.at_minus_infinity.is_finite() && s.at_plus_infinity.is_finite());
    }

    #[test]
    fn same_side_increments_shrink(
        k in built_in_kernel(),
        a in 1e-3f64..50.0,
        gap in 1e-3f64..50.0,
        h in 1e-3f64..50.0,
        negative in any::<bool>(),
    ) {
        let (t1, t2) = if negative { (-(a + gap + h), -(a + h)) } else { (a, a + gap) };
        let (ok, lhs, rhs) = same_side_shift_holds(&k, t1, t2, h);
        prop_assert!(ok, "{lhs} > {rhs}");
    }

    #[test]
    fn across_origin_increments_grow_under_gm(
        k in built_in_kernel(),
        a in 1e-3f64..50.0,
        h in 1e-3f64..50.0,
        t2 in 1e-3f64..50.0,
    ) {
        let t1 = -(a + h);
        let (ok, lhs, rhs) = across_origin_shift_holds(&k, t1, t2, h);
        prop_assert!(ok, "{lhs} > {rhs}");
    }

    #[test]
    fn fields_stay_below_upper_bound(f in continuous_field(), t in -100.0f64..100.0) {
        prop_assert!(f.value(t) <= f.upper_bound());
    }

    #[test]
    fn admissibility_survives_translation(
        f in continuous_field(),
        ks in prop::collection::vec(built_in_kernel(), 1..4),
        shifts in prop::collection::vec(-5.0f64..5.0, 3),
    ) {
        // Linear terms can beat |t|; only test sums the probe accepts.
        prop_assume!(is_admissible(&f, &ks, DEFAULT_PROBE_LEVELS).admissible);
        let verdict = probe_divergence(&f, &ks, &shifts[..ks.len()], DEFAULT_PROBE_LEVELS);
        prop_assert!(verdict.admissible, "{:?}", verdict.reason);
    }

    #[test]
    fn differences_telescope((p, y) in problem_and_nodes(4)) {
        let r = local_maxima(&p, &y).unwrap();
        let d = r.differences().unwrap();
        prop_assert!((d.sum() - r.span().unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn maxima_dominate_samples_and_are_attained((p, y) in problem_and_nodes(3), u in prop::collection::vec(0.0f64..1.0, 16)) {
        let r = local_maxima(&p, &y).unwrap();
        let nodes = y.as_slice();
        let mut bounds = vec![-r.truncation_radius];
        bounds.extend_from_slice(nodes);
        bounds.push(r.truncation_radius);
        for (j, w) in bounds.windows(2).enumerate() {
            let m = r.m[j].to_f64();
            for &s in &u {
                let t = w[0] + s * (w[1] - w[0]);
                prop_assert!(m >= p.f_raw(nodes, t) - 1e-9);
            }
            let z = r.z[j].unwrap();
            prop_assert!((p.f_raw(nodes, z) - m).abs() <= 1e-9);
        }
    }

    #[test]
    fn maximizers_are_local_peaks((p, y) in problem_and_nodes(3)) {
        let r = local_maxima(&p, &y).unwrap();
        let nodes = y.as_slice();
        for z in r.z.iter().flatten() {
            let fz = p.f_raw(nodes, *z);
            prop_assert!(p.f_raw(nodes, z + 1e-6) <= fz + 1e-8);
            prop_assert!(p.f_raw(nodes, z - 1e-6) <= fz + 1e-8);
        }
    }

    #[test]
    fn translation_covariance((p, y) in problem_and_nodes(3), c in -3.0f64..3.0) {
        let moved = NodeConfig::new(y.as_slice().iter().map(|v| v + c).collect()).unwrap();
        let q = p.shifted_field(c).unwrap();
        for (a, b) in m_values(&p, &y).iter().zip(m_values(&q, &moved)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn even_symmetry(n in 1usize..=4, w in 0.5f64..2.0, seed_nodes in prop::collection::vec(-1.5f64..1.5, 4)) {
        let p = Problem::new(vec![Kernel::log_abs(w).unwrap(); n], Field::neg_square(1.0).unwrap()).unwrap();
        let mut v = seed_nodes[..n].to_vec();
        v.sort_by(f64::total_cmp);
        prop_assume!(v.windows(2).all(|w| w[1] - w[0] >= 0.02));
        let y = NodeConfig::new(v.clone()).unwrap();
        let mirrored = NodeConfig::new(v.iter().rev().map(|t| -t).collect()).unwrap();
        let d = difference_map(&p, &y).unwrap().0;
        let dm = difference_map(&p, &mirrored).unwrap().0;
        for (a, b) in dm.iter().zip(d.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-9);
        }
    }

    #[test]
    fn truncation_is_stable((p, y) in problem_and_nodes(4)) {
        let tau = tail_bound(&p, &y, p.search().tail_margin).unwrap();
        let a = local_maxima_with_radius(&p, &y, tau).unwrap();
        let b = local_maxima_with_radius(&p, &y, 2.0 * tau).unwrap();
        for (u, v) in a.m.iter().zip(&b.m) {
            prop_assert!((u.to_f64() - v.to_f64()).abs() < 1e-9);
        }
    }

    #[test]
    fn maxima_are_continuous((p, y) in problem_and_nodes(3), delta in prop::collection::vec(-1e-6f64..1e-6, 3)) {
        let moved: Vec<f64> = y.as_slice().iter().zip(&delta).map(|(a, b)| a + b).collect();
        let moved = NodeConfig::new(moved).unwrap();
        for (a, b) in m_values(&p, &y).iter().zip(m_values(&p, &moved)) {
            prop_assert!((a - b).abs() <= 1e-3);
        }
    }

    #[test]
    fn ratio_map_is_exp_of_differences(
        r in prop::collection::vec(0.5f64..2.0, 1..=4),
        raw in prop::collection::vec(-1.5f64..1.5, 4),
    ) {
        let mut v = raw[..r.len()].to_vec();
        v.sort_by(f64::total_cmp);
        prop_assume!(v.windows(2).all(|w| w[1] - w[0] >= 0.02));
        let y = NodeConfig::new(v).unwrap();
        let weight = Field::neg_abs(1.0).unwrap();
        let ratios = weighted_poly_ratio_map(&y, &weight, &r).unwrap();
        let p = Problem::new(r.iter().map(|&w| Kernel::log_abs(w).unwrap()).collect(), weight).unwrap();
        for (q, d) in ratios.iter().zip(difference_map(&p, &y).unwrap().as_slice()) {
            prop_assert!((q - d.exp()).abs() <= 1e-9 * d.exp());
        }
    }

    #[test]
    fn oracle_agrees_with_interval_search((p, y) in problem_and_nodes(2)) {
        let step = 1e-3;
        let r = local_maxima(&p, &y).unwrap();
        let extent = tail_bound(&p, &y, 1.0).unwrap();
        let g = grid_local_maxima(&p, &y, GridSpec::new(step, extent).unwrap()).unwrap();
        let nodes = y.as_slice();
        for j in 0..r.m.len() {
            let z = r.z[j].unwrap();
            let fz = p.f_raw(nodes, z);
            let slope = [z - step, z + step]
                .iter()
                .map(|&t| (p.f_raw(nodes, t) - fz).abs() / step)
                .filter(|s| s.is_finite())
                .fold(0.0f64, f64::max);
            let diff = (r.m[j].to_f64() - g.m[j].to_f64()).abs();
            prop_assert!(diff <= 2.0 * slope * step + 1e-9, "interval {j}: {diff} vs slope {slope}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inversion_round_trip((p, y) in problem_and_nodes(3)) {
        let d = difference_map(&p, &y).unwrap();
        let r = invert_difference(&p, d.as_slice(), &SolveOptions::default()).unwrap();
        prop_assert!(r.converged && r.residual <= 1e-8);
        prop_assert!(r.y.is_strictly_increasing());
        prop_assert!(r.y.distance(&y) <= 1e-6);
        prop_assert!(r.start_spread() <= 1e-5);
    }

    #[test]
    fn equioscillation_of_even_problems_is_symmetric(n in 1usize..=4, w in 0.5f64..2.0) {
        let p = Problem::new(vec![Kernel::log_abs(w).unwrap(); n], Field::neg_square(1.0).unwrap()).unwrap();
        let e = equioscillate(&p, &SolveOptions::default()).unwrap();
        let y = e.solve.y.as_slice();
        for (a, b) in y.iter().zip(y.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-7, "{y:?}");
        }
        prop_assert!(e.spread <= 2e-8);
    }

    #[test]
    fn lipschitz_lower_bound_stays_positive((p, y) in problem_and_nodes(3), seed in any::<u64>()) {
        let probe = local_lipschitz_probe(&p, &y, 0.005, 40, seed).unwrap();
        prop_assert!(probe.lower > 0.0 && probe.upper.is_finite());
    }

    #[test]
    fn interpolation_scales_linearly_in_alpha(a1 in 0.2f64..5.0, lambda in 0.1f64..10.0) {
        let problem = |alpha: Vec<f64>| InterpolationProblem {
            x: Some(vec![-1.0, 0.5, 2.0]),
            alpha,
            factors: vec![Kernel::log_abs(1.0).unwrap(); 2],
            weight: Field::neg_abs(1.0).unwrap(),
        };
        let opts = SolveOptions::default();
        let base = log_concave_interpolate(&problem(vec![1.0, a1, 1.5]), &opts).unwrap();
        let scaled = log_concave_interpolate(&problem(vec![lambda, lambda * a1, lambda * 1.5]), &opts).unwrap();
        prop_assert!(base.y.distance(&scaled.y) <= 1e-9);
        prop_assert!((scaled.c - lambda * base.c).abs() <= 1e-9 * scaled.c);
        let x = [-1.0, 0.5, 2.0];
        let y = base.y.as_slice();
        prop_assert!(x[0] < y[0] && y[0] < x[1] && x[1] < y[1] && y[1] < x[2]);
        for (g, a) in base.achieved.iter().zip([1.0, a1, 1.5]) {
            prop_assert!((g - a).abs() <= 1e-8 * a.max(1.0));
        }
    }

    #[test]
    fn semiaxis_nodes_are_nonnegative(d in prop::collection::vec(-2.0f64..2.0, 2)) {
        let kernels = vec![Kernel::log_abs(1.0).unwrap(); 2];
        let half = Field::neg_square(1.0).unwrap();
        let r = semiaxis_solve(kernels.clone(), half.clone(), &d, &SolveOptions::default()).unwrap();
        prop_assert!(r.y.as_slice()[0] >= 0.0);
        let extended = semiaxis_problem(kernels, half).unwrap();
        let back = difference_map(&extended, &r.y).unwrap();
        prop_assert!(back.distance(&d) <= 1e-8);
    }

    #[test]
    fn grid_minimizer_is_unique_up_to_ties(d in -2.0f64..2.0, w in 0.5f64..2.0) {
        let p = Problem::new(vec![Kernel::log_abs(w).unwrap()], Field::neg_square(1.0).unwrap()).unwrap();
        let g = grid_invert(&p, &[d], GridSpec::new(1e-3, 6.0).unwrap()).unwrap();
        prop_assert!(g.tie_spread <= 1e-3 + 1e-12);
    }
}
