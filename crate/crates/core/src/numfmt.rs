//! Text rendering of numbers for reports and CSV output.

use crate::ext::ExtReal;

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}

/// Shortest decimal form of `x` rounded to `digits` significant digits;
/// `−∞` renders as `-inf`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    let r = round_sig(x, digits);
    let s = format!("{r}");
    // `Display` never uses exponents; switch to them for very large or tiny values.
    if s.len() > 24 {
        format!("{r:e}")
    } else {
        s
    }
}

pub fn format_ext(x: ExtReal, digits: usize) -> String {
    format_sig(x.to_f64(), digits)
}
