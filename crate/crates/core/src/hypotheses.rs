//! Numerical checks of the structural hypotheses on kernels and fields.
//!
//! None of these are proofs. They sample the objects and report what they
//! see, so callers can refuse problems that are clearly outside the theory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ext::ExtReal;
use crate::field::Field;
use crate::kernel::Kernel;

/// Absolute tolerance at unit scale for the sampled inequalities.
pub const INEQUALITY_TOL: f64 = 1e-12;

/// Default number of dyadic probe levels for the admissibility check.
pub const DEFAULT_PROBE_LEVELS: u32 = 24;

/// The tail must end this far below the running maximum.
const ADMISSIBLE_DROP: f64 = 10.0;
/// Number of trailing probes that must be strictly decreasing.
const DECREASING_RUN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftPart {
    /// `0 < t1 < t2 < t2 + h`
    PositiveSide,
    /// `t1 < t2 < t2 + h < 0`
    NegativeSide,
    /// `t1 < t1 + h < 0 < t2`, only meaningful under generalized monotonicity.
    AcrossOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftViolation {
    pub part: ShiftPart,
    pub t1: f64,
    pub t2: f64,
    pub h: f64,
    /// Left and right sides of the violated inequality.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShiftReport {
    pub tuples_checked: usize,
    pub violations: Vec<ShiftViolation>,
    pub notes: Vec<String>,
}

impl ShiftReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the increment inequality for one same-side tuple:
/// `K(t2+h) − K(t1+h) ≤ K(t2) − K(t1)`.
pub fn same_side_shift_holds(k: &Kernel, t1: f64, t2: f64, h: f64) -> (bool, f64, f64) {
    let lhs = k.value(t2 + h) - k.value(t1 + h);
    let rhs = k.value(t2) - k.value(t1);
    (lhs <= rhs + tolerance(k, &[t1, t2, t1 + h, t2 + h]), lhs, rhs)
}

/// Checks the across-origin inequality: `K(t2) − K(t1) ≤ K(t2+h) − K(t1+h)`.
pub fn across_origin_shift_holds(k: &Kernel, t1: f64, t2: f64, h: f64) -> (bool, f64, f64) {
    let lhs = k.value(t2) - k.value(t1);
    let rhs = k.value(t2 + h) - k.value(t1 + h);
    (lhs <= rhs + tolerance(k, &[t1, t2, t1 + h, t2 + h]), lhs, rhs)
}

fn tolerance(k: &Kernel, ts: &[f64]) -> f64 {
    let scale = ts.iter().map(|&t| k.value(t).abs()).fold(1.0, f64::max);
    INEQUALITY_TOL * scale
}

/// Log-uniform magnitude in `[1e-3, 1e2]`.
fn magnitude(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-3.0..2.0))
}

/// Samples random tuples satisfying the ordering hypotheses of the shift
/// inequalities and reports every violation.
///
/// Tuples across the origin are only drawn when the kernel satisfies
/// generalized monotonicity; otherwise that part is skipped with a note.
pub fn check_shift_inequalities(k: &Kernel, sample_count: usize, seed: u64) -> ShiftReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ShiftReport::default();
    let gm = k.slope_limits().map(|s| s.gm_holds);
    let check_across = match gm {
        Ok(true) => true,
        Ok(false) => {
            report.notes.push("GM hypothesis not met; part-2 skipped".into());
            false
        }
        Err(e) => {
            report.notes.push(format!("slope limits unavailable ({e}); part-2 skipped"));
            false
        }
    };

    for _ in 0..sample_count.max(1) {
        // 0 < t1 < t2 < t2 + h
        let t1 = magnitude(&mut rng);
        let t2 = t1 + magnitude(&mut rng);
        let h = magnitude(&mut rng);
        record(&mut report, ShiftPart::PositiveSide, t1, t2, h, same_side_shift_holds(k, t1, t2, h));

        // t1 < t2 < t2 + h < 0
        let gap_to_zero = magnitude(&mut rng);
        let h = magnitude(&mut rng);
        let t2 = -gap_to_zero - h;
        let t1 = t2 - magnitude(&mut rng);
        record(&mut report, ShiftPart::NegativeSide, t1, t2, h, same_side_shift_holds(k, t1, t2, h));

        if check_across {
            // t1 < t1 + h < 0 < t2
            let gap_to_zero = magnitude(&mut rng);
            let h = magnitude(&mut rng);
            let t1 = -gap_to_zero - h;
            let t2 = magnitude(&mut rng);
            record(&mut report, ShiftPart::AcrossOrigin, t1, t2, h, across_origin_shift_holds(k, t1, t2, h));
        }
    }
    report
}

fn record(report: &mut ShiftReport, part: ShiftPart, t1: f64, t2: f64, h: f64, outcome: (bool, f64, f64)) {
    report.tuples_checked += 1;
    let (ok, lhs, rhs) = outcome;
    if !ok {
        report.violations.push(ShiftViolation { part, t1, t2, h, lhs, rhs });
    }
}

/// Midpoint-above-chord test on random same-side triples. Returns the
/// triples `(t1, t2, t3)` that violate concavity beyond the tolerance.
pub fn check_sampled_concavity(k: &Kernel, sample_count: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for _ in 0..sample_count {
        let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut ts = [magnitude(&mut rng), magnitude(&mut rng), magnitude(&mut rng)];
        ts.sort_by(f64::total_cmp);
        if ts[0] == ts[1] || ts[1] == ts[2] {
            continue;
        }
        let [a, b, c] = ts.map(|t| t * side);
        let (va, vb, vc) = (k.value(a), k.value(b), k.value(c));
        let lambda = (c - b) / (c - a);
        let chord = lambda * va + (1.0 - lambda) * vc;
        let scale = 1f64.max(va.abs()).max(vc.abs());
        if vb < chord - INEQUALITY_TOL * scale {
            bad.push((a, b, c));
        }
    }
    bad
}

/// Singularity verdict: exact for built-in kernels, sampled
/// (`K(±10⁻ᵏ) < −k` for `k = 8..16`) for tables.
pub fn singularity_holds(k: &Kernel) -> bool {
    use crate::kernel::KernelKind;
    match k.kind() {
        KernelKind::LogAbs { .. } | KernelKind::LogAbsPlusLinear { .. } => true,
        KernelKind::Table(_) => {
            k.is_singular()
                && (8..=16).all(|e| {
                    let t = 10f64.powi(-e);
                    k.value(t) < -(e as f64) && k.value(-t) < -(e as f64)
                })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub t: f64,
    pub value: ExtReal,
}

/// Outcome of the dyadic divergence probe.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    /// Probes toward `−∞`, in increasing distance from the origin.
    pub left_trail: Vec<ProbeRecord>,
    /// Probes toward `+∞`.
    pub right_trail: Vec<ProbeRecord>,
    pub reason: Option<String>,
}

/// Sampling-based admissibility check for `J + Σ Kⱼ`.
///
/// Probes `t = ±2ᵏ`, `k = 0..=probe_levels`. The verdict is positive iff in
/// both directions the last probe lies more than 10 below the running
/// maximum of all probes and the last five probes are strictly decreasing
/// (`−∞` counts as below everything, including itself). This is a
/// heuristic and not a proof of the limit condition.
pub fn is_admissible(field: &Field, kernels: &[Kernel], probe_levels: u32) -> AdmissibilityVerdict {
    let zeros = vec![0.0; kernels.len()];
    probe_divergence(field, kernels, &zeros, probe_levels)
}

/// Same probe schedule as [`is_admissible`] applied to the translated sum
/// `J(t) + Σ Kⱼ(t − yⱼ)`.
pub fn probe_divergence(field: &Field, kernels: &[Kernel], shifts: &[f64], probe_levels: u32) -> AdmissibilityVerdict {
    assert_eq!(kernels.len(), shifts.len(), "one shift per kernel");
    let sum = |t: f64| {
        let v = field.value(t)
            + kernels
                .iter()
                .zip(shifts)
                .map(|(k, &y)| k.value(t - y))
                .sum::<f64>();
        ExtReal::from_f64(v)
    };
    let levels = probe_levels.max(DECREASING_RUN as u32);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut running = ExtReal::NEG_INFINITY;
    for k in 0..=levels {
        let t = 2f64.powi(k as i32);
        let (vl, vr) = (sum(-t), sum(t));
        running = running.max(vl).max(vr);
        left.push(ProbeRecord { t: -t, value: vl });
        right.push(ProbeRecord { t, value: vr });
    }

    let mut reason = None;
    for (name, trail) in [("-inf", &left), ("+inf", &right)] {
        if let Some(why) = tail_failure(trail, running) {
            reason = Some(format!("toward {name}: {why}"));
            break;
        }
    }
    AdmissibilityVerdict {
        admissible: reason.is_none(),
        left_trail: left,
        right_trail: right,
        reason,
    }
}

fn tail_failure(trail: &[ProbeRecord], running: ExtReal) -> Option<String> {
    let last = trail.last().expect("nonempty trail").value;
    if let (Some(l), Some(r)) = (last.value(), running.value()) {
        if l >= r - ADMISSIBLE_DROP {
            return Some(format!("last probe {l} not below running maximum {r} - {ADMISSIBLE_DROP}"));
        }
    }
    let tail = &trail[trail.len() - DECREASING_RUN..];
    for w in tail.windows(2) {
        let (a, b) = (w[0].value, w[1].value);
        let decreasing = b.is_neg_infinity() || (a.is_finite() && b < a);
        if !decreasing {
            return Some(format!("probes at t = {} and t = {} do not decrease", w[0].t, w[1].t));
        }
    }
    None
}
