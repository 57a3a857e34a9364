//! JSON descriptions of problems, as read by the command-line tool.
//!
//! Kernels: `{"type":"log","weight":w}`, `{"type":"log_linear","weight":w,
//! "slope":c}`, `{"type":"table","neg_knots":[[t,v],…],"pos_knots":[[t,v],…],
//! "end_slopes":[l,r],"zero_limit":"-inf","strictly_concave":true}`.
//! Fields: `neg_abs`, `neg_square` (with `scale`), `discrete` (with
//! `points`), `restrict_semiaxis` (with `inner`), `table` (with `knots` of
//! `log w`) and `shift` (with `offset` and `inner`).

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::applications::InterpolationProblem;
use crate::error::Error;
use crate::ext::ExtReal;
use crate::field::Field;
use crate::kernel::{Kernel, TableKernel};
use crate::problem::{Problem, SearchOptions};
use crate::solver::SolveOptions;

fn one() -> f64 {
    1.0
}

/// A number, or the string `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtNumber {
    Number(f64),
    Text(NegInf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NegInf {
    #[serde(rename = "-inf")]
    NegInf,
}

impl ExtNumber {
    fn to_ext(self) -> Result<ExtReal, Error> {
        match self {
            ExtNumber::Text(NegInf::NegInf) => Ok(ExtReal::NEG_INFINITY),
            ExtNumber::Number(x) if x.is_finite() => Ok(ExtReal::finite(x)),
            ExtNumber::Number(_) => Err(Error::InvalidKernel("zero_limit must be finite or \"-inf\"".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelDesc {
    Log {
        #[serde(default = "one")]
        weight: f64,
    },
    LogLinear {
        #[serde(default = "one")]
        weight: f64,
        slope: f64,
    },
    Table {
        neg_knots: Vec<[f64; 2]>,
        pos_knots: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end_slopes: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zero_limit: Option<ExtNumber>,
        #[serde(default)]
        strictly_concave: bool,
    },
}

fn pairs(v: &[[f64; 2]]) -> Vec<(f64, f64)> {
    v.iter().map(|p| (p[0], p[1])).collect()
}

impl KernelDesc {
    pub fn build(&self) -> Result<Kernel, Error> {
        match self {
            KernelDesc::Log { weight } => Kernel::log_abs(*weight),
            KernelDesc::LogLinear { weight, slope } => Kernel::log_abs_plus_linear(*weight, *slope),
            KernelDesc::Table { neg_knots, pos_knots, end_slopes, zero_limit, strictly_concave } => {
                let zero = zero_limit.map(ExtNumber::to_ext).transpose()?;
                let table = TableKernel::new(
                    pairs(neg_knots),
                    pairs(pos_knots),
                    end_slopes.map(|s| (s[0], s[1])),
                    zero,
                )?;
                Ok(Kernel::table(table, *strictly_concave))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldDesc {
    NegAbs {
        #[serde(default = "one")]
        scale: f64,
    },
    NegSquare {
        #[serde(default = "one")]
        scale: f64,
    },
    Discrete {
        points: Vec<[f64; 2]>,
    },
    RestrictSemiaxis {
        inner: Box<FieldDesc>,
    },
    Table {
        knots: Vec<[f64; 2]>,
    },
    Shift {
        offset: f64,
        inner: Box<FieldDesc>,
    },
}

impl FieldDesc {
    pub fn build(&self) -> Result<Field, Error> {
        match self {
            FieldDesc::NegAbs { scale } => Field::neg_abs(*scale),
            FieldDesc::NegSquare { scale } => Field::neg_square(*scale),
            FieldDesc::Discrete { points } => Field::discrete(pairs(points)),
            FieldDesc::RestrictSemiaxis { inner } => Ok(Field::restrict_semiaxis(inner.build()?)),
            FieldDesc::Table { knots } => Field::log_weight_table(pairs(knots)),
            FieldDesc::Shift { offset, inner } => Field::shifted(inner.build()?, *offset),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_density: Option<usize>,
}

impl OptionsDesc {
    pub fn solve_options(&self) -> SolveOptions {
        let d = SolveOptions::default();
        SolveOptions {
            tol: self.tol.unwrap_or(d.tol),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            starts: self.starts.unwrap_or(d.starts),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    pub fn search_options(&self) -> SearchOptions {
        let d = SearchOptions::default();
        SearchOptions { grid_density: self.grid_density.unwrap_or(d.grid_density), ..d }
    }

    fn check(&self) -> Result<(), DescriptorError> {
        let invalid = |path: &str, msg: &str| DescriptorError::Invalid {
            path: path.into(),
            source: Error::InvalidInput(msg.into()),
        };
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("options.tol", "must be positive"));
            }
        }
        if self.starts == Some(0) {
            return Err(invalid("options.starts", "must be at least 1"));
        }
        if let Some(g) = self.grid_density {
            if g < 8 {
                return Err(invalid("options.grid_density", "must be at least 8"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kernels: Vec<KernelDesc>,
    pub field: FieldDesc,
    #[serde(default)]
    pub options: OptionsDesc,
    #[serde(default)]
    pub assume_admissible: bool,
}

fn build_kernels(descs: &[KernelDesc], key: &str) -> Result<Vec<Kernel>, DescriptorError> {
    descs
        .iter()
        .enumerate()
        .map(|(i, k)| k.build().map_err(|e| DescriptorError::Invalid { path: format!("{key}[{i}]"), source: e }))
        .collect()
}

fn build_field(desc: &FieldDesc, key: &str) -> Result<Field, DescriptorError> {
    desc.build().map_err(|e| DescriptorError::Invalid { path: key.into(), source: e })
}

impl ProblemFile {
    pub fn build(&self) -> Result<(Problem, SolveOptions), DescriptorError> {
        self.options.check()?;
        let kernels = build_kernels(&self.kernels, "kernels")?;
        let field = build_field(&self.field, "field")?;
        let problem = Problem::new(kernels, field)
            .map_err(|e| DescriptorError::Invalid { path: ".".into(), source: e })?
            .with_search(self.options.search_options())
            .assume_admissible(self.assume_admissible);
        Ok((problem, self.options.solve_options()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationMode {
    Points,
    #[serde(alias = "hf")]
    HermiteFejer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolationFile {
    pub factors: Vec<KernelDesc>,
    pub weight: FieldDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    pub alpha: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<InterpolationMode>,
    #[serde(default)]
    pub options: OptionsDesc,
}

impl InterpolationFile {
    pub fn build(&self) -> Result<(InterpolationProblem, SolveOptions), DescriptorError> {
        self.options.check()?;
        let problem = InterpolationProblem {
            x: self.x.clone(),
            alpha: self.alpha.clone(),
            factors: build_kernels(&self.factors, "factors")?,
            weight: build_field(&self.weight, "weight")?,
        };
        Ok((problem, self.options.solve_options()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioMapFile {
    pub weight: FieldDesc,
    pub exponents: Vec<f64>,
}

impl RatioMapFile {
    pub fn build(&self) -> Result<Field, DescriptorError> {
        build_field(&self.weight, "weight")
    }
}

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid description at {path} (line {line}, column {column}): {message}")]
    Schema { path: String, line: usize, column: usize, message: String },
    #[error("invalid description at {path}: {source}")]
    Invalid { path: String, source: Error },
}

/// Parses a description; schema errors name the JSON path of the
/// offending value.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, DescriptorError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        let message = inner.to_string();
        if inner.is_data() {
            DescriptorError::Schema { path, line, column, message }
        } else {
            DescriptorError::Syntax { line, column, message }
        }
    })?;
    Ok(value)
}
