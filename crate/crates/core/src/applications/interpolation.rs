use crate::error::{Error, Result};
use crate::field::Field;
use crate::hypotheses::{self, DEFAULT_PROBE_LEVELS};
use crate::kernel::Kernel;
use crate::problem::{NodeConfig, Problem};
use crate::solver::{invert_difference, SolveOptions};

/// Interpolation with `G(t) = C·w(t)·Π Lⱼ(t − yⱼ)`, where `Lⱼ = exp∘Kⱼ` and
/// `w = exp∘J`. The unknowns are `C > 0` and the nodes `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationProblem {
    /// Abscissae `x₀ < … < xₙ`; `None` for the moving-node variant.
    pub x: Option<Vec<f64>>,
    /// Target values `α₀, …, αₙ`.
    pub alpha: Vec<f64>,
    /// `log Lⱼ`
    pub factors: Vec<Kernel>,
    /// `log w`
    pub weight: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationResult {
    pub c: f64,
    pub y: NodeConfig,
    /// Maximum points of `G` per interval (moving-node variant only).
    pub z: Option<Vec<f64>>,
    /// `G(xⱼ)` or `G(zⱼ)`
    pub achieved: Vec<f64>,
    /// False when some factor is only claimed, not known, to be strictly
    /// log-concave; the result is then labelled "hypotheses unverified".
    pub hypotheses_verified: bool,
    pub residual: f64,
}

/// Relative tolerance of the reconstruction check `G(xⱼ) = αⱼ`.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// The solve runs tighter than the reconstruction check so that errors in
/// the differences do not add up past it.
const INNER_TOL: f64 = 1e-11;

impl InterpolationProblem {
    fn validate_alpha(&self) -> Result<Vec<f64>> {
        let n = self.factors.len();
        if n == 0 {
            return Err(Error::InvalidInput("at least one factor is required".into()));
        }
        if self.alpha.len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: self.alpha.len() });
        }
        if self.alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidInput("alpha values must be positive and finite".into()));
        }
        Ok(self.alpha.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
    }

    fn check_tails(&self) -> Result<()> {
        let verdict = hypotheses::is_admissible(&self.weight, &self.factors, DEFAULT_PROBE_LEVELS);
        if verdict.admissible {
            Ok(())
        } else {
            Err(Error::HypothesesUnmet(format!(
                "w·ΠLⱼ does not vanish at infinity: {}",
                verdict.reason.unwrap_or_default()
            )))
        }
    }
}

fn inner_options(opts: &SolveOptions) -> SolveOptions {
    SolveOptions { tol: opts.tol.min(INNER_TOL), ..*opts }
}

fn check_reconstruction(achieved: &[f64], alpha: &[f64]) -> Result<()> {
    for (index, (&a, &t)) in achieved.iter().zip(alpha).enumerate() {
        let err = (a - t).abs();
        if err.is_nan() || err > RECONSTRUCTION_TOL * t.max(1.0) {
            return Err(Error::InconsistentInterpolation { index, achieved: a, target: t });
        }
    }
    Ok(())
}

/// Interpolation at fixed abscissae.
///
/// The field is `log w` restricted to the abscissae, so every interval
/// maximum is attained at one of them and `mⱼ(y) = F(y, xⱼ)` exactly.
pub fn log_concave_interpolate(p: &InterpolationProblem, opts: &SolveOptions) -> Result<InterpolationResult> {
    let d_target = p.validate_alpha()?;
    let n = p.factors.len();
    let x = p
        .x
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("abscissae are required".into()))?;
    if x.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("abscissae must be finite and strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(n + 1);
    for &xj in x {
        let j = p.weight.value(xj);
        if !j.is_finite() {
            return Err(Error::InvalidInput(format!("weight vanishes at abscissa {xj}")));
        }
        points.push((xj, j));
    }
    p.check_tails()?;

    let problem = Problem::new(p.factors.clone(), Field::discrete(points)?)?;
    let report = problem.require_main_hypotheses()?;
    let solve = invert_difference(&problem, &d_target, &inner_options(opts))?;
    let y = solve.y.as_slice();
    for j in 0..n {
        if !(x[j] < y[j] && y[j] < x[j + 1]) {
            return Err(Error::InvalidInput(format!("node {j} does not interlace the abscissae")));
        }
    }
    let c = p.alpha[0] * (-problem.f_raw(y, x[0])).exp();
    let achieved: Vec<f64> = x.iter().map(|&t| c * problem.f_raw(y, t).exp()).collect();
    check_reconstruction(&achieved, &p.alpha)?;
    Ok(InterpolationResult {
        c,
        y: solve.y,
        z: None,
        achieved,
        hypotheses_verified: report.fully_verified(),
        residual: solve.residual,
    })
}

/// Moving-node Hermite–Fejér interpolation: `G` takes the value `αⱼ` at its
/// own maximum point `zⱼ` on the `j`-th interval.
pub fn hermite_fejer_interpolate(p: &InterpolationProblem, opts: &SolveOptions) -> Result<InterpolationResult> {
    let d_target = p.validate_alpha()?;
    if p.x.is_some() {
        return Err(Error::InvalidInput("moving-node interpolation takes no abscissae".into()));
    }
    p.check_tails()?;
    let problem = Problem::new(p.factors.clone(), p.weight.clone())?;
    let report = problem.require_main_hypotheses()?;
    let solve = invert_difference(&problem, &d_target, &inner_options(opts))?;
    let m: Vec<f64> = solve.maxima.m.iter().map(|v| v.to_f64()).collect();
    let z: Vec<f64> = solve
        .maxima
        .z
        .iter()
        .enumerate()
        .map(|(index, z)| z.ok_or(Error::NotInRegularitySet { index }))
        .collect::<Result<_>>()?;
    let y = solve.y.as_slice();
    let interlaced = z.iter().zip(y).all(|(zj, yj)| zj < yj) && z[1..].iter().zip(y).all(|(zj, yj)| yj < zj);
    if !interlaced {
        return Err(Error::InvalidInput("maximum points do not interlace the nodes".into()));
    }
    let c = p.alpha[0] / m[0].exp();
    let achieved: Vec<f64> = m.iter().map(|mj| c * mj.exp()).collect();
    check_reconstruction(&achieved, &p.alpha)?;
    Ok(InterpolationResult {
        c,
        y: solve.y,
        z: Some(z),
        achieved,
        hypotheses_verified: report.fully_verified(),
        residual: solve.residual,
    })
}
