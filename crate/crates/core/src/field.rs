//! External field functions `J : ℝ → ℝ ∪ {−∞}`, bounded above.

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// Number of points where a field is finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SupportCount {
    Finite(usize),
    Infinite,
}

impl SupportCount {
    /// Whether the field is finite at more than `n` points.
    pub fn exceeds(self, n: usize) -> bool {
        match self {
            SupportCount::Finite(c) => c > n,
            SupportCount::Infinite => true,
        }
    }
}

impl std::fmt::Display for SupportCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SupportCount::Finite(c) => write!(f, "{c}"),
            SupportCount::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    /// `J(t) = −a|t|`
    NegAbs { scale: f64 },
    /// `J(t) = −a t²`
    NegSquare { scale: f64 },
    /// Piecewise-linear `log w`, constant beyond the outer knots.
    LogWeightTable { knots: Vec<(f64, f64)> },
    /// Finite only at the listed points, `−∞` elsewhere.
    Discrete { points: Vec<(f64, f64)> },
    /// `−∞` for `t < 0`, the inner field for `t ≥ 0`.
    RestrictSemiaxis(Box<Field>),
    /// `J(t) = inner(t − offset)`.
    Shifted { inner: Box<Field>, offset: f64 },
}

impl Field {
    pub fn neg_abs(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Field::NegAbs { scale })
    }

    pub fn neg_square(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Field::NegSquare { scale })
    }

    pub fn log_weight_table(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidField("table needs at least one knot".into()));
        }
        if knots.iter().any(|&(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidField("table knots must be finite".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidField("duplicate table abscissa".into()));
        }
        Ok(Field::LogWeightTable { knots })
    }

    pub fn discrete(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidField("discrete field needs at least one point".into()));
        }
        if points.iter().any(|&(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidField("discrete points must be finite".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidField("duplicate discrete abscissa".into()));
        }
        Ok(Field::Discrete { points })
    }

    pub fn restrict_semiaxis(inner: Field) -> Self {
        Field::RestrictSemiaxis(Box::new(inner))
    }

    pub fn shifted(inner: Field, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::InvalidField("shift offset must be finite".into()));
        }
        Ok(Field::Shifted { inner: Box::new(inner), offset })
    }

    /// Raw evaluation; `−∞` is `f64::NEG_INFINITY`.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Field::NegAbs { scale } => -scale * t.abs(),
            Field::NegSquare { scale } => -scale * t * t,
            Field::LogWeightTable { knots } => table_value(knots, t),
            Field::Discrete { points } => match points.binary_search_by(|p| p.0.total_cmp(&t)) {
                Ok(i) => points[i].1,
                Err(_) => f64::NEG_INFINITY,
            },
            Field::RestrictSemiaxis(inner) => {
                if t < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    inner.value(t)
                }
            }
            Field::Shifted { inner, offset } => inner.value(t - offset),
        }
    }

    pub fn eval(&self, t: f64) -> ExtReal {
        ExtReal::from_f64(self.value(t))
    }

    pub fn upper_bound(&self) -> f64 {
        match self {
            Field::NegAbs { .. } | Field::NegSquare { .. } => 0.0,
            Field::LogWeightTable { knots } => knots.iter().map(|k| k.1).fold(f64::NEG_INFINITY, f64::max),
            Field::Discrete { points } => points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
            Field::RestrictSemiaxis(inner) => inner.upper_bound(),
            Field::Shifted { inner, .. } => inner.upper_bound(),
        }
    }

    pub fn finite_support_count(&self) -> SupportCount {
        match self.finite_support() {
            Some(points) => SupportCount::Finite(points.len()),
            None => SupportCount::Infinite,
        }
    }

    /// The finite support `(x, J(x))`, sorted by `x`, for fields that are
    /// finite at only finitely many points. `None` for continuous kinds.
    pub fn finite_support(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Field::Discrete { points } => Some(points.clone()),
            Field::RestrictSemiaxis(inner) => inner
                .finite_support()
                .map(|pts| pts.into_iter().filter(|p| p.0 >= 0.0).collect()),
            Field::Shifted { inner, offset } => inner
                .finite_support()
                .map(|pts| pts.into_iter().map(|(x, v)| (x + offset, v)).collect()),
            _ => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.finite_support().is_some()
    }

    /// Points where the field is not smooth (kinks, jumps, support edges).
    /// Interval searches evaluate these exactly.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Field::NegAbs { .. } => vec![0.0],
            Field::NegSquare { .. } => Vec::new(),
            Field::LogWeightTable { knots } => knots.iter().map(|k| k.0).collect(),
            Field::Discrete { points } => points.iter().map(|p| p.0).collect(),
            Field::RestrictSemiaxis(inner) => {
                let mut b: Vec<f64> = inner.breakpoints().into_iter().filter(|&x| x > 0.0).collect();
                b.insert(0, 0.0);
                b
            }
            Field::Shifted { inner, offset } => inner.breakpoints().into_iter().map(|x| x + offset).collect(),
        }
    }

    /// Infimum of the region where the field can be finite (`−∞` when
    /// unrestricted).
    pub fn support_lower_limit(&self) -> f64 {
        match self {
            Field::RestrictSemiaxis(inner) => inner.support_lower_limit().max(0.0),
            Field::Shifted { inner, offset } => inner.support_lower_limit() + offset,
            Field::Discrete { points } => points[0].0,
            _ => f64::NEG_INFINITY,
        }
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidField(format!("scale must be positive, got {scale}")))
    }
}

fn table_value(knots: &[(f64, f64)], t: f64) -> f64 {
    let idx = knots.partition_point(|&(x, _)| x <= t);
    if idx == 0 {
        return knots[0].1;
    }
    if idx == knots.len() {
        return knots[idx - 1].1;
    }
    let (x0, v0) = knots[idx - 1];
    let (x1, v1) = knots[idx];
    v0 + (v1 - v0) * (t - x0) / (x1 - x0)
}
