use std::fs;
use std::path::{Path, PathBuf};

use attrib_core::data::load_csv_detect_header;
use attrib_core::shapley::explain;
use attrib_core::valuefn::DiscreteMode;
use attrib_core::{
    AttributionResult, CoalitionMode, DiscreteDistribution, GaussianSpec, LinearModel, Model, SampleMatrix,
    ValueFunctionSpec,
};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Value-function choice as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    Marginal,
    CondGauss,
    CondKernel,
    ExactMarginal,
    ExactConditional,
}

impl ValueKind {
    pub fn label(self) -> &'static str {
        match self {
            ValueKind::Marginal => "marginal",
            ValueKind::CondGauss => "cond-gauss",
            ValueKind::CondKernel => "cond-kernel",
            ValueKind::ExactMarginal => "exact-marginal",
            ValueKind::ExactConditional => "exact-conditional",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    Exact,
    Wls,
}

#[derive(Debug, Clone)]
pub struct ExplainRequest {
    pub model: PathBuf,
    pub arity: Option<usize>,
    pub instance: Vec<f64>,
    pub value_fn: ValueKind,
    pub background: Option<PathBuf>,
    pub gaussian: Option<PathBuf>,
    pub discrete: Option<PathBuf>,
    pub mode: ModeKind,
    pub budget: usize,
    pub samples: usize,
    pub bandwidth: f64,
    pub neighbors: usize,
    pub seed: u64,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses `1.5,-2,3e-1`.
pub fn parse_reals(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::usage(format!("not a finite number: {t:?}")))
        })
        .collect()
}

/// Parses 1-based indices `1,2,3` into 0-based ones, each below `n`.
pub fn parse_indices(s: &str, n: usize) -> CliResult<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for t in s.split(',') {
        let t = t.trim();
        match t.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => out.push(i - 1),
            _ => return Err(CliError::usage(format!("feature index {t:?} not in 1..={n}"))),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Model file: an expression in `x1..xn`, or a JSON linear model
/// `{"intercept": .., "coefficients": [..]}`.
pub fn load_model(path: &Path, arity: usize) -> CliResult<Model> {
    let text = read(path)?;
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let lin: LinearModel = serde_json::from_str(trimmed).map_err(attrib_core::Error::from)?;
        if lin.arity() != arity {
            return Err(CliError::usage(format!(
                "linear model has {} coefficients, instance has {arity} features",
                lin.arity()
            )));
        }
        return Ok(Model::Linear(lin));
    }
    Ok(Model::parse(trimmed, arity)?)
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    Ok(serde_json::from_str(&read(path)?).map_err(attrib_core::Error::from)?)
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str, kind: ValueKind) -> CliResult<&'a Path> {
    path.as_deref()
        .ok_or_else(|| CliError::usage(format!("--value-fn {} requires {flag}", kind.label())))
}

pub fn load_background(path: &Path) -> CliResult<SampleMatrix> {
    Ok(load_csv_detect_header(path)?)
}

/// Builds the value-function spec a request describes.
pub fn build_spec(req: &ExplainRequest) -> CliResult<ValueFunctionSpec> {
    let kind = req.value_fn;
    let spec = match kind {
        ValueKind::Marginal => {
            let background = load_background(require(&req.background, "--background", kind)?)?;
            let sample_count = req.samples.min(background.nrows());
            ValueFunctionSpec::MarginalMc {
                background,
                sample_count,
                fixed_background: true,
                seed: req.seed,
            }
        }
        ValueKind::CondGauss => {
            let g: GaussianSpec = load_json(require(&req.gaussian, "--gaussian", kind)?)?;
            ValueFunctionSpec::conditional_gaussian(g, req.samples, req.seed)
        }
        ValueKind::CondKernel => {
            let background = load_background(require(&req.background, "--background", kind)?)?;
            ValueFunctionSpec::conditional_kernel(background, req.bandwidth, req.neighbors)
        }
        ValueKind::ExactMarginal | ValueKind::ExactConditional => {
            let d: DiscreteDistribution = load_json(require(&req.discrete, "--discrete", kind)?)?;
            let mode = if kind == ValueKind::ExactMarginal {
                DiscreteMode::Marginal
            } else {
                DiscreteMode::Conditional
            };
            ValueFunctionSpec::exact(d, mode)
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Shapley attribution of one instance.
pub fn cmd_explain(req: &ExplainRequest) -> CliResult<AttributionResult> {
    let n = req.instance.len();
    if n == 0 {
        return Err(CliError::usage("--instance is empty"));
    }
    if let Some(a) = req.arity {
        if a != n {
            return Err(CliError::usage(format!("--arity {a} but --instance has {n} values")));
        }
    }
    let model = load_model(&req.model, n)?;
    let spec = build_spec(req)?;
    let mode = match req.mode {
        ModeKind::Exact => CoalitionMode::Exact,
        ModeKind::Wls => CoalitionMode::Wls {
            budget: req.budget,
            seed: req.seed,
        },
    };
    Ok(explain(&model, &req.instance, &spec, mode)?)
}
