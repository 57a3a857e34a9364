//! A sum-of-translates problem: `n` kernels and one field.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::field::Field;
use crate::hypotheses::{self, AdmissibilityVerdict, DEFAULT_PROBE_LEVELS};
use crate::kernel::{Kernel, SlopeLimits};

/// Ordered node vector `y₁ ≤ … ≤ yₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeConfig(Vec<f64>);

impl NodeConfig {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidInput("node vector is empty".into()));
        }
        if nodes.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidInput("nodes must be finite".into()));
        }
        if nodes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("nodes must be sorted ascending".into()));
        }
        Ok(NodeConfig(nodes))
    }

    /// Sorts the input first.
    pub fn from_unsorted(mut nodes: Vec<f64>) -> Result<Self> {
        nodes.sort_by(f64::total_cmp);
        Self::new(nodes)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `‖a − b‖∞`
    pub fn distance(&self, other: &NodeConfig) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Tuning for the interval searches behind the local maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Coarse grid points per interval.
    pub grid_density: usize,
    /// Golden-section termination width in `t`.
    pub t_tol: f64,
    /// Samples closer than this to a singular node are skipped.
    pub node_guard: f64,
    /// Margin passed to the tail bound when truncating the end intervals.
    pub tail_margin: f64,
    /// Number of best grid candidates refined by golden section.
    pub refine_candidates: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid_density: 2048,
            t_tol: 1e-9,
            node_guard: 1e-12,
            tail_margin: 2.0,
            refine_candidates: 3,
        }
    }
}

/// Verdicts for the hypotheses under which the difference map is a
/// homeomorphism onto `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub singular: Vec<bool>,
    pub strictly_concave_claimed: Vec<bool>,
    /// `Err` carries the reason slope limits could not be computed.
    pub slope_limits: Vec<std::result::Result<SlopeLimits, Error>>,
    pub admissibility: AdmissibilityVerdict,
    pub admissibility_overridden: bool,
}

impl HypothesisReport {
    pub fn gm_holds(&self) -> bool {
        self.slope_limits.iter().all(|s| matches!(s, Ok(l) if l.gm_holds))
    }

    /// Everything the solver needs. Strict concavity is a claim only and is
    /// not part of this verdict; see [`Self::fully_verified`].
    pub fn solver_ready(&self) -> bool {
        self.singular.iter().all(|&s| s)
            && self.gm_holds()
            && (self.admissibility.admissible || self.admissibility_overridden)
    }

    pub fn fully_verified(&self) -> bool {
        self.solver_ready() && self.strictly_concave_claimed.iter().all(|&s| s)
    }

    /// Human-readable list of failed hypotheses.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (j, &s) in self.singular.iter().enumerate() {
            if !s {
                out.push(format!("kernel {j} is not singular"));
            }
        }
        for (j, s) in self.slope_limits.iter().enumerate() {
            match s {
                Ok(l) if !l.gm_holds => out.push(format!(
                    "kernel {j}: GM violated: slopes ({}, {})",
                    l.at_minus_infinity, l.at_plus_infinity
                )),
                Err(e) => out.push(format!("kernel {j}: {e}")),
                _ => {}
            }
        }
        if !self.admissibility.admissible && !self.admissibility_overridden {
            out.push("field is not admissible".into());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    kernels: Vec<Kernel>,
    field: Field,
    search: SearchOptions,
    assume_admissible: bool,
}

impl Problem {
    /// Validates sizes: at least one kernel, and a field finite at more
    /// than `n` points.
    pub fn new(kernels: Vec<Kernel>, field: Field) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidInput("at least one kernel is required".into()));
        }
        let n = kernels.len();
        let support = field.finite_support_count();
        if !support.exceeds(n) {
            let finite_points = match support {
                crate::field::SupportCount::Finite(c) => c,
                crate::field::SupportCount::Infinite => unreachable!(),
            };
            return Err(Error::InsufficientFieldSupport { finite_points, nodes: n });
        }
        Ok(Problem {
            kernels,
            field,
            search: SearchOptions::default(),
            assume_admissible: false,
        })
    }

    pub fn with_search(mut self, search: SearchOptions) -> Self {
        self.search = search;
        self
    }

    /// Accept the field as admissible even if the sampled probe says
    /// otherwise.
    pub fn assume_admissible(mut self, yes: bool) -> Self {
        self.assume_admissible = yes;
        self
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn search(&self) -> &SearchOptions {
        &self.search
    }

    /// Number of kernels (and nodes).
    pub fn n(&self) -> usize {
        self.kernels.len()
    }

    pub fn all_singular(&self) -> bool {
        self.kernels.iter().all(Kernel::is_singular)
    }

    /// `J(t) + Σ Kⱼ(t − yⱼ)` as a raw `f64` (`−∞` allowed).
    #[inline]
    pub fn f_raw(&self, y: &[f64], t: f64) -> f64 {
        let mut acc = self.field.value(t);
        if acc == f64::NEG_INFINITY {
            return acc;
        }
        for (k, &yj) in self.kernels.iter().zip(y) {
            acc += k.value(t - yj);
        }
        acc
    }

    /// Same problem with the field translated by `c`.
    pub fn shifted_field(&self, c: f64) -> Result<Self> {
        Ok(Problem {
            field: Field::shifted(self.field.clone(), c)?,
            ..self.clone()
        })
    }

    pub fn check_dimension(&self, y: &NodeConfig) -> Result<()> {
        if y.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: y.len() });
        }
        Ok(())
    }

    pub fn hypotheses(&self) -> HypothesisReport {
        HypothesisReport {
            singular: self.kernels.iter().map(hypotheses::singularity_holds).collect(),
            strictly_concave_claimed: self.kernels.iter().map(Kernel::strictly_concave_claimed).collect(),
            slope_limits: self.kernels.iter().map(Kernel::slope_limits).collect(),
            admissibility: hypotheses::is_admissible(&self.field, &self.kernels, DEFAULT_PROBE_LEVELS),
            admissibility_overridden: self.assume_admissible,
        }
    }

    /// Errors with the list of failures unless the solver hypotheses hold.
    pub fn require_main_hypotheses(&self) -> Result<HypothesisReport> {
        let report = self.hypotheses();
        if report.solver_ready() {
            Ok(report)
        } else {
            Err(Error::HypothesesUnmet(report.failures().join("; ")))
        }
    }
}

/// `F(y, t)` in the extended reals.
pub fn evaluate_f(problem: &Problem, y: &NodeConfig, t: f64) -> Result<ExtReal> {
    problem.check_dimension(y)?;
    Ok(ExtReal::from_f64(problem.f_raw(y.as_slice(), t)))
}
