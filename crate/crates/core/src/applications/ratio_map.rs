use crate::error::{Error, Result};
use crate::field::Field;
use crate::hypotheses::{self, DEFAULT_PROBE_LEVELS};
use crate::kernel::Kernel;
use crate::maxima;
use crate::problem::{NodeConfig, Problem};

/// Ratios `sup_{I_j} P / sup_{I_{j−1}} P` of `P(t) = w(t)·Π|t − yⱼ|^{rⱼ}`
/// over consecutive intervals cut by the nodes. `weight` is `log w`.
///
/// Taking logarithms turns `P` into a sum of translates with kernels
/// `rⱼ·log|·|`, so the result is `exp` of the difference map.
pub fn weighted_poly_ratio_map(y: &NodeConfig, weight: &Field, exponents: &[f64]) -> Result<Vec<f64>> {
    if exponents.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), got: exponents.len() });
    }
    if !y.is_strictly_increasing() {
        return Err(Error::InvalidInput("nodes must be strictly increasing".into()));
    }
    let kernels = exponents
        .iter()
        .map(|&r| Kernel::log_abs(r))
        .collect::<Result<Vec<_>>>()?;
    let verdict = hypotheses::is_admissible(weight, &kernels, DEFAULT_PROBE_LEVELS);
    if !verdict.admissible {
        return Err(Error::InvalidField(format!(
            "w·Π|t − yⱼ|^rⱼ does not vanish at infinity: {}",
            verdict.reason.unwrap_or_default()
        )));
    }
    let problem = Problem::new(kernels, weight.clone())?;
    let d = maxima::difference_map(&problem, y)?;
    Ok(d.0.iter().map(|v| v.exp()).collect())
}
