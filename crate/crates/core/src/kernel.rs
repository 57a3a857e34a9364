//! Kernel functions: concave on each open half-axis, with a common limit at
//! the origin that is either finite or `−∞` (singular kernels).

use crate::error::{Error, HalfAxis, Result};
use crate::ext::ExtReal;

/// Relative tolerance used when checking table concavity and the matching
/// of the two one-sided limits at the origin.
const TABLE_TOL: f64 = 1e-9;

/// Piecewise-linear kernel given by knots on each half-axis.
///
/// Outside the outermost knots the table is continued linearly with the end
/// slopes. Between the innermost knot and the origin the innermost segment
/// is continued; a singular table additionally adds `log(|t| / |t_inner|)`
/// there so the value drops to `−∞` at the origin while staying concave.
#[derive(Debug, Clone, PartialEq)]
pub struct TableKernel {
    neg_knots: Vec<(f64, f64)>,
    pos_knots: Vec<(f64, f64)>,
    explicit_end_slopes: Option<(f64, f64)>,
    zero_limit: Option<ExtReal>,
    // Derived slopes, cached at construction.
    left_end: f64,
    right_end: f64,
    neg_inner: f64,
    pos_inner: f64,
}

impl TableKernel {
    /// Builds and validates a table kernel.
    ///
    /// `neg_knots` must have strictly negative abscissae and `pos_knots`
    /// strictly positive ones; both are sorted here. End slopes may be
    /// omitted when a half-axis carries at least two knots.
    pub fn new(
        mut neg_knots: Vec<(f64, f64)>,
        mut pos_knots: Vec<(f64, f64)>,
        end_slopes: Option<(f64, f64)>,
        zero_limit: Option<ExtReal>,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidKernel(m.to_string()));
        if neg_knots.is_empty() || pos_knots.is_empty() {
            return bad("table kernel needs at least one knot per half-axis");
        }
        for &(t, v) in neg_knots.iter().chain(pos_knots.iter()) {
            if !t.is_finite() || !v.is_finite() {
                return bad("table knots must be finite");
            }
        }
        if neg_knots.iter().any(|&(t, _)| t >= 0.0) {
            return bad("neg_knots must lie on t < 0");
        }
        if pos_knots.iter().any(|&(t, _)| t <= 0.0) {
            return bad("pos_knots must lie on t > 0");
        }
        neg_knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        pos_knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if has_duplicate_abscissa(&neg_knots) || has_duplicate_abscissa(&pos_knots) {
            return bad("duplicate knot abscissa");
        }
        if let Some((l, r)) = end_slopes {
            if !l.is_finite() || !r.is_finite() {
                return bad("end slopes must be finite");
            }
        }

        let neg_segs = segment_slopes(&neg_knots);
        let pos_segs = segment_slopes(&pos_knots);
        let left_end = match (end_slopes, neg_segs.first()) {
            (Some((l, _)), _) => l,
            (None, Some(&s)) => s,
            (None, None) => return bad("end_slopes required when a half-axis has a single knot"),
        };
        let right_end = match (end_slopes, pos_segs.last()) {
            (Some((_, r)), _) => r,
            (None, Some(&s)) => s,
            (None, None) => return bad("end_slopes required when a half-axis has a single knot"),
        };
        let neg_inner = neg_segs.last().copied().unwrap_or(left_end);
        let pos_inner = pos_segs.first().copied().unwrap_or(right_end);

        // Slopes must be non-increasing from left to right on each side.
        let neg_chain: Vec<f64> = std::iter::once(left_end)
            .chain(neg_segs.iter().copied())
            .chain(std::iter::once(neg_inner))
            .collect();
        let pos_chain: Vec<f64> = std::iter::once(pos_inner)
            .chain(pos_segs.iter().copied())
            .chain(std::iter::once(right_end))
            .collect();
        for chain in [&neg_chain, &pos_chain] {
            for w in chain.windows(2) {
                if w[1] > w[0] + TABLE_TOL * (1.0 + w[0].abs()) {
                    return bad("table is not concave on a half-axis");
                }
            }
        }

        let table = TableKernel {
            neg_knots,
            pos_knots,
            explicit_end_slopes: end_slopes,
            zero_limit,
            left_end,
            right_end,
            neg_inner,
            pos_inner,
        };

        match zero_limit {
            Some(z) if z.is_neg_infinity() => {
                for k in 8..=16 {
                    let t = 10f64.powi(-k);
                    if table.value(t) >= -(k as f64) || table.value(-t) >= -(k as f64) {
                        return bad("singular table does not fall below -k at ±1e-k");
                    }
                }
            }
            _ => {
                let (l, r) = table.one_sided_zero_limits();
                let scale = 1.0 + l.abs().max(r.abs());
                if (l - r).abs() > TABLE_TOL * scale {
                    return bad("one-sided limits at 0 disagree");
                }
                if let Some(z) = zero_limit.and_then(ExtReal::value) {
                    if (z - l).abs() > TABLE_TOL * scale {
                        return bad("zero_limit does not match the table's limit at 0");
                    }
                }
            }
        }
        Ok(table)
    }

    pub fn neg_knots(&self) -> &[(f64, f64)] {
        &self.neg_knots
    }

    pub fn pos_knots(&self) -> &[(f64, f64)] {
        &self.pos_knots
    }

    pub fn end_slopes(&self) -> Option<(f64, f64)> {
        self.explicit_end_slopes
    }

    pub fn zero_limit(&self) -> Option<ExtReal> {
        self.zero_limit
    }

    fn is_singular(&self) -> bool {
        matches!(self.zero_limit, Some(z) if z.is_neg_infinity())
    }

    fn one_sided_zero_limits(&self) -> (f64, f64) {
        let &(tn, vn) = self.neg_knots.last().expect("nonempty");
        let &(tp, vp) = self.pos_knots.first().expect("nonempty");
        (vn - self.neg_inner * tn, vp - self.pos_inner * tp)
    }

    fn value(&self, t: f64) -> f64 {
        if t == 0.0 {
            if self.is_singular() {
                return f64::NEG_INFINITY;
            }
            let (l, r) = self.one_sided_zero_limits();
            return 0.5 * (l + r);
        }
        let singular = self.is_singular();
        if t < 0.0 {
            let knots = &self.neg_knots;
            let &(t0, v0) = knots.first().expect("nonempty");
            let &(ti, vi) = knots.last().expect("nonempty");
            if t <= t0 {
                return v0 + self.left_end * (t - t0);
            }
            if t > ti {
                let base = vi + self.neg_inner * (t - ti);
                return if singular { base + (t / ti).ln() } else { base };
            }
            interpolate(knots, t)
        } else {
            let knots = &self.pos_knots;
            let &(ti, vi) = knots.first().expect("nonempty");
            let &(tl, vl) = knots.last().expect("nonempty");
            if t >= tl {
                return vl + self.right_end * (t - tl);
            }
            if t < ti {
                let base = vi + self.pos_inner * (t - ti);
                return if singular { base + (t / ti).ln() } else { base };
            }
            interpolate(knots, t)
        }
    }
}

fn has_duplicate_abscissa(knots: &[(f64, f64)]) -> bool {
    knots.windows(2).any(|w| w[0].0 == w[1].0)
}

fn segment_slopes(knots: &[(f64, f64)]) -> Vec<f64> {
    knots
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect()
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    let idx = knots.partition_point(|&(x, _)| x <= t);
    let (x0, v0) = knots[idx - 1];
    if idx == knots.len() {
        return v0;
    }
    let (x1, v1) = knots[idx];
    v0 + (v1 - v0) * (t - x0) / (x1 - x0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// `w·log|t|`
    LogAbs { weight: f64 },
    /// `w·log|t| + c·t`
    LogAbsPlusLinear { weight: f64, slope: f64 },
    Table(TableKernel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    strictly_concave_claimed: bool,
}

/// Limits of `K'` at `−∞` and `+∞`, and whether generalized monotonicity
/// (`K'(−∞) ≤ K'(+∞)`) holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeLimits {
    pub at_minus_infinity: f64,
    pub at_plus_infinity: f64,
    pub gm_holds: bool,
}

impl SlopeLimits {
    fn new(at_minus_infinity: f64, at_plus_infinity: f64) -> Self {
        SlopeLimits {
            at_minus_infinity,
            at_plus_infinity,
            gm_holds: at_minus_infinity <= at_plus_infinity,
        }
    }
}

impl Kernel {
    pub fn log_abs(weight: f64) -> Result<Self> {
        check_weight(weight)?;
        Ok(Kernel {
            kind: KernelKind::LogAbs { weight },
            strictly_concave_claimed: true,
        })
    }

    pub fn log_abs_plus_linear(weight: f64, slope: f64) -> Result<Self> {
        check_weight(weight)?;
        if !slope.is_finite() {
            return Err(Error::InvalidKernel("slope must be finite".into()));
        }
        Ok(Kernel {
            kind: KernelKind::LogAbsPlusLinear { weight, slope },
            strictly_concave_claimed: true,
        })
    }

    /// Wraps a table. Strict concavity cannot be certified from knots, so it
    /// is only recorded as a claim.
    pub fn table(table: TableKernel, strictly_concave_claimed: bool) -> Self {
        Kernel {
            kind: KernelKind::Table(table),
            strictly_concave_claimed,
        }
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn strictly_concave_claimed(&self) -> bool {
        self.strictly_concave_claimed
    }

    pub fn is_singular(&self) -> bool {
        match &self.kind {
            KernelKind::LogAbs { .. } | KernelKind::LogAbsPlusLinear { .. } => true,
            KernelKind::Table(t) => t.is_singular(),
        }
    }

    /// Raw evaluation used on hot paths. At the origin this is the kernel's
    /// limit there (`−∞` for singular kernels).
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            KernelKind::LogAbs { weight } => weight * t.abs().ln(),
            KernelKind::LogAbsPlusLinear { weight, slope } => {
                if t == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    weight * t.abs().ln() + slope * t
                }
            }
            KernelKind::Table(table) => table.value(t),
        }
    }

    /// `K(t)` in the extended reals. At `t = 0` a singular kernel yields
    /// `−∞`; a non-singular table needs an explicit zero limit.
    pub fn eval(&self, t: f64) -> Result<ExtReal> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("kernel argument {t} is not finite")));
        }
        if t == 0.0 {
            if self.is_singular() {
                return Ok(ExtReal::NEG_INFINITY);
            }
            return match &self.kind {
                KernelKind::Table(table) => table.zero_limit.ok_or(Error::KernelUndefinedAtZero),
                _ => unreachable!("built-in kernels are singular"),
            };
        }
        Ok(ExtReal::finite(self.value(t)))
    }

    pub fn slope_limits(&self) -> Result<SlopeLimits> {
        match &self.kind {
            KernelKind::LogAbs { .. } => Ok(SlopeLimits::new(0.0, 0.0)),
            KernelKind::LogAbsPlusLinear { slope, .. } => Ok(SlopeLimits::new(*slope, *slope)),
            KernelKind::Table(table) => {
                if table.neg_knots.len() < 2 {
                    return Err(Error::InsufficientKnots(HalfAxis::Negative));
                }
                if table.pos_knots.len() < 2 {
                    return Err(Error::InsufficientKnots(HalfAxis::Positive));
                }
                Ok(SlopeLimits::new(table.left_end, table.right_end))
            }
        }
    }
}

fn check_weight(weight: f64) -> Result<()> {
    if weight.is_finite() && weight > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidKernel(format!("weight must be positive, got {weight}")))
    }
}
