//! Sums of translates `F(y, t) = J(t) + Σⱼ Kⱼ(t − yⱼ)` on the real axis.
//!
//! The crate evaluates `F`, computes the vector of local maxima between
//! consecutive nodes and the difference map `D(y) = (m_j − m_{j−1})_j`, and
//! inverts `D` numerically. Under singular, strictly concave kernels with
//! generalized monotonicity and an admissible field, `D` is a homeomorphism
//! from the regularity set onto `ℝⁿ`, so every target has exactly one
//! preimage; the solver relies on this for equioscillation and
//! interpolation problems.

pub mod applications;
pub mod descriptor;
pub mod error;
pub mod ext;
pub mod field;
pub mod golden;
pub mod hypotheses;
pub mod kernel;
pub mod maxima;
pub mod numfmt;
pub mod oracle;
pub mod problem;
pub mod solver;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use field::{Field, SupportCount};
pub use kernel::{Kernel, KernelKind, SlopeLimits, TableKernel};
pub use maxima::{difference_map, in_regularity_set, local_maxima, tail_bound, DifferenceVector, MaximaReport};
pub use problem::{evaluate_f, NodeConfig, Problem, SearchOptions};
