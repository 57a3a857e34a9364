//! Extended reals restricted to `ℝ ∪ {−∞}`.
//!
//! Every quantity in this crate is bounded above (fields are bounded above,
//! kernels are finite away from the origin), so `+∞` never arises and the
//! only non-finite state that needs a representation is `−∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// A value that is either a finite real or `−∞`.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const NEG_INFINITY: ExtReal = ExtReal(f64::NEG_INFINITY);

    /// Wraps a finite value. Panics on NaN or `+∞`.
    pub fn finite(x: f64) -> Self {
        assert!(x.is_finite(), "ExtReal::finite called with {x}");
        ExtReal(x)
    }

    /// Maps any `f64` into the two-state representation: finite values are
    /// kept, everything else (including NaN) collapses to `−∞`.
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            ExtReal(x)
        } else {
            Self::NEG_INFINITY
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_neg_infinity(self) -> bool {
        !self.is_finite()
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Raw `f64`, with `−∞` mapped to `f64::NEG_INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.0
    }

    /// `exp` of the value; `exp(−∞) = 0`.
    pub fn exp(self) -> f64 {
        self.0.exp()
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        if self.is_finite() && rhs.is_finite() {
            ExtReal::from_f64(self.0 + rhs.0)
        } else {
            ExtReal::NEG_INFINITY
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::from_f64(rhs)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // No NaN and no +∞ by construction.
        self.0.total_cmp(&other.0)
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            fmt::Display::fmt(&self.0, f)
        } else {
            f.write_str("-inf")
        }
    }
}
