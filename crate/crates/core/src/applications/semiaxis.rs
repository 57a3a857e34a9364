use crate::error::Result;
use crate::field::Field;
use crate::kernel::Kernel;
use crate::problem::Problem;
use crate::solver::{invert_difference, SolveOptions, SolveResult};

/// Extends a field given on `[0, ∞)` by `−∞` on the negative axis.
/// A field that is already restricted is left as is.
pub fn semiaxis_problem(kernels: Vec<Kernel>, field_on_half_line: Field) -> Result<Problem> {
    let field = match field_on_half_line {
        f @ Field::RestrictSemiaxis(_) => f,
        f => Field::restrict_semiaxis(f),
    };
    Problem::new(kernels, field)
}

/// Inverts the difference map for nodes on `[0, ∞)`. The left interval is
/// `[0, y₁]` in effect, and every returned node is nonnegative.
pub fn semiaxis_solve(
    kernels: Vec<Kernel>,
    field_on_half_line: Field,
    d_target: &[f64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let problem = semiaxis_problem(kernels, field_on_half_line)?;
    invert_difference(&problem, d_target, opts)
}
