//! Problems that reduce to inverting the difference map: nodes on a
//! half-line, sup-ratios of weighted generalized polynomials, and
//! interpolation by products of translated log-concave factors.

mod interpolation;
mod ratio_map;
mod semiaxis;

pub use interpolation::{
    hermite_fejer_interpolate, log_concave_interpolate, InterpolationProblem, InterpolationResult,
};
pub use ratio_map::weighted_poly_ratio_map;
pub use semiaxis::{semiaxis_problem, semiaxis_solve};
