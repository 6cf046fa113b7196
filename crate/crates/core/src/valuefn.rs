//! Simplified functions `f_T(x)`: the value of a model when only the
//! features in `T` are fixed to the instance and the rest are averaged out.
//!
//! Two families are implemented. The marginal (interventional) value
//! `E[f(x_T, X_rest)]` draws the dropped features from their unconditional
//! distribution. The observational conditional value
//! `E[f(x_T, X_rest) | X_T = x_T]` draws them conditioned on the kept ones.
//! Only the former guarantees that a feature the model ignores receives zero
//! Shapley value.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::data::{empirical_covariance, DiscreteDistribution, GaussianSampler, GaussianSpec, SampleMatrix};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::Model;
use crate::rng::stream_rng;

/// Monte-Carlo draws per coalition evaluation.
pub const DEFAULT_SAMPLE_COUNT: usize = 1000;

/// Kernel bandwidth `sigma^2` for the conditional kernel estimator.
pub const DEFAULT_BANDWIDTH: f64 = 0.1;

/// Number of highest-weight background rows the kernel estimator keeps.
pub const DEFAULT_NEIGHBOR_COUNT: usize = 1000;

fn default_sample_count() -> usize {
    DEFAULT_SAMPLE_COUNT
}

fn default_bandwidth() -> f64 {
    DEFAULT_BANDWIDTH
}

fn default_neighbor_count() -> usize {
    DEFAULT_NEIGHBOR_COUNT
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscreteMode {
    Marginal,
    Conditional,
}

/// Estimator strategy and its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ValueFunctionSpec {
    MarginalMc {
        background: SampleMatrix,
        #[serde(default = "default_sample_count")]
        sample_count: usize,
        #[serde(default = "yes")]
        fixed_background: bool,
        #[serde(default)]
        seed: u64,
    },
    ConditionalGaussian {
        gaussian: GaussianSpec,
        #[serde(default = "default_sample_count")]
        sample_count: usize,
        #[serde(default)]
        seed: u64,
    },
    ConditionalKernel {
        background: SampleMatrix,
        #[serde(default = "default_bandwidth")]
        bandwidth: f64,
        #[serde(default = "default_neighbor_count")]
        neighbor_count: usize,
    },
    ExactDiscreteMarginal {
        discrete: DiscreteDistribution,
    },
    ExactDiscreteConditional {
        discrete: DiscreteDistribution,
    },
}

impl ValueFunctionSpec {
    pub fn marginal(background: SampleMatrix, seed: u64) -> Self {
        ValueFunctionSpec::MarginalMc {
            sample_count: background.nrows(),
            background,
            fixed_background: true,
            seed,
        }
    }

    pub fn conditional_gaussian(gaussian: GaussianSpec, sample_count: usize, seed: u64) -> Self {
        ValueFunctionSpec::ConditionalGaussian {
            gaussian,
            sample_count,
            seed,
        }
    }

    pub fn conditional_kernel(background: SampleMatrix, bandwidth: f64, neighbor_count: usize) -> Self {
        ValueFunctionSpec::ConditionalKernel {
            background,
            bandwidth,
            neighbor_count,
        }
    }

    pub fn exact(discrete: DiscreteDistribution, mode: DiscreteMode) -> Self {
        match mode {
            DiscreteMode::Marginal => ValueFunctionSpec::ExactDiscreteMarginal { discrete },
            DiscreteMode::Conditional => ValueFunctionSpec::ExactDiscreteConditional { discrete },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ValueFunctionSpec::MarginalMc { .. } => "marginal-mc",
            ValueFunctionSpec::ConditionalGaussian { .. } => "conditional-gaussian",
            ValueFunctionSpec::ConditionalKernel { .. } => "conditional-kernel",
            ValueFunctionSpec::ExactDiscreteMarginal { .. } => "exact-discrete-marginal",
            ValueFunctionSpec::ExactDiscreteConditional { .. } => "exact-discrete-conditional",
        }
    }

    /// Whether values are exact rather than Monte-Carlo or kernel estimates.
    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            ValueFunctionSpec::ExactDiscreteMarginal { .. } | ValueFunctionSpec::ExactDiscreteConditional { .. }
        )
    }

    /// Number of features the distribution describes.
    pub fn dim(&self) -> usize {
        match self {
            ValueFunctionSpec::MarginalMc { background, .. }
            | ValueFunctionSpec::ConditionalKernel { background, .. } => background.ncols(),
            ValueFunctionSpec::ConditionalGaussian { gaussian, .. } => gaussian.dim(),
            ValueFunctionSpec::ExactDiscreteMarginal { discrete }
            | ValueFunctionSpec::ExactDiscreteConditional { discrete } => discrete.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ValueFunctionSpec::MarginalMc { sample_count, .. }
            | ValueFunctionSpec::ConditionalGaussian { sample_count, .. }
                if *sample_count == 0 =>
            {
                Err(Error::InvalidSpec("sample_count must be at least 1".into()))
            }
            ValueFunctionSpec::ConditionalKernel { bandwidth, .. } if !(*bandwidth > 0.0 && bandwidth.is_finite()) => {
                Err(Error::InvalidSpec(format!("bandwidth {bandwidth} must be positive")))
            }
            ValueFunctionSpec::ConditionalKernel { neighbor_count: 0, .. } => {
                Err(Error::InvalidSpec("neighbor_count must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// `f_T(x)` under this estimator.
    pub fn value(&self, model: &Model, x: &[f64], t: Coalition) -> Result<f64> {
        match self {
            ValueFunctionSpec::MarginalMc {
                background,
                sample_count,
                fixed_background,
                seed,
            } => marginal_mc(model, x, t, background, *sample_count, *fixed_background, *seed),
            ValueFunctionSpec::ConditionalGaussian {
                gaussian,
                sample_count,
                seed,
            } => conditional_gaussian_value(model, x, t, gaussian, *sample_count, *seed),
            ValueFunctionSpec::ConditionalKernel {
                background,
                bandwidth,
                neighbor_count,
            } => conditional_kernel_value(model, x, t, background, *bandwidth, *neighbor_count),
            ValueFunctionSpec::ExactDiscreteMarginal { discrete } => {
                exact_discrete_value(model, x, t, discrete, DiscreteMode::Marginal)
            }
            ValueFunctionSpec::ExactDiscreteConditional { discrete } => {
                exact_discrete_value(model, x, t, discrete, DiscreteMode::Conditional)
            }
        }
    }
}

fn check_inputs(model: &Model, x: &[f64], t: Coalition, dim: usize) -> Result<()> {
    Error::check_len("valuefn", model.arity(), x.len())?;
    Error::check_len("valuefn", model.arity(), dim)?;
    Error::check_len("valuefn", model.arity(), t.n())
}

/// Average of `f(x_T, row_rest)` over background rows.
///
/// With `fixed_background` the first `sample_count` rows are used for every
/// coalition, so estimates for different coalitions share their noise.
/// Otherwise `sample_count` rows are drawn with replacement from a stream
/// keyed by `(seed, T)`.
pub fn marginal_mc(
    model: &Model,
    x: &[f64],
    t: Coalition,
    background: &SampleMatrix,
    sample_count: usize,
    fixed_background: bool,
    seed: u64,
) -> Result<f64> {
    check_inputs(model, x, t, background.ncols())?;
    if sample_count == 0 {
        return Err(Error::InvalidSpec("sample_count must be at least 1".into()));
    }
    if t.is_full() {
        return model.evaluate(x);
    }
    let mut z = vec![0.0; x.len()];
    let mut total = 0.0;
    if fixed_background {
        let k = sample_count.min(background.nrows());
        for r in 0..k {
            t.splice(x, background.row(r), &mut z);
            total += model.evaluate(&z)?;
        }
        Ok(total / k as f64)
    } else {
        let mut rng = stream_rng(seed, t.bits());
        for _ in 0..sample_count {
            let r = rng.random_range(0..background.nrows());
            t.splice(x, background.row(r), &mut z);
            total += model.evaluate(&z)?;
        }
        Ok(total / sample_count as f64)
    }
}

/// Distribution of the features outside `T` given `X_T = x_t`.
///
/// `x_t` lists the kept values in increasing feature order. A singular
/// `Sigma_TT` is inverted through its pseudo-inverse.
pub fn gaussian_condition(spec: &GaussianSpec, t: Coalition, x_t: &[f64]) -> Result<GaussianSpec> {
    Error::check_len("valuefn", spec.dim(), t.n())?;
    Error::check_len("valuefn", t.len(), x_t.len())?;
    if t.is_empty() || t.is_full() {
        return Err(Error::invalid(
            "valuefn",
            "conditioning set must be nonempty and proper",
        ));
    }
    let kept: Vec<usize> = t.indices().collect();
    let rest: Vec<usize> = t.complement().indices().collect();
    let sigma = spec.cov();
    let mu = spec.mean();
    let block =
        |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| sigma[(rows[i], cols[j])]);
    let s_tt = block(&kept, &kept);
    let s_rt = block(&rest, &kept);
    let s_rr = block(&rest, &rest);
    let s_tt_inv = linalg::pinv_symmetric(&s_tt, "valuefn")?;
    let gain = &s_rt * s_tt_inv;
    let shift = DVector::from_fn(kept.len(), |i, _| x_t[i] - mu[kept[i]]);
    let mean = DVector::from_fn(rest.len(), |i, _| mu[rest[i]]) + &gain * shift;
    let cov = linalg::symmetrize(&(s_rr - &gain * s_rt.transpose()));
    // clamp roundoff negatives relative to the parent scale
    let factor = linalg::psd_sqrt_with_scale(&cov, sigma.trace().abs())?;
    let cov = &factor * factor.transpose();
    Ok(GaussianSpec::from_parts_unchecked(mean, cov))
}

/// Monte-Carlo estimate of `E[f(x_T, X_rest) | X_T = x_T]` under a Gaussian.
pub fn conditional_gaussian_value(
    model: &Model,
    x: &[f64],
    t: Coalition,
    spec: &GaussianSpec,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    check_inputs(model, x, t, spec.dim())?;
    if sample_count == 0 {
        return Err(Error::InvalidSpec("sample_count must be at least 1".into()));
    }
    if t.is_full() {
        return model.evaluate(x);
    }
    let (sampler, rest): (GaussianSampler, Vec<usize>) = if t.is_empty() {
        (spec.sampler()?, (0..x.len()).collect())
    } else {
        let x_t: Vec<f64> = t.indices().map(|i| x[i]).collect();
        let cond = gaussian_condition(spec, t, &x_t)?;
        let factor = linalg::psd_sqrt_with_scale(cond.cov(), spec.cov().trace().abs())?;
        (
            GaussianSampler::from_factor(cond.mean().clone(), factor),
            t.complement().indices().collect(),
        )
    };
    let mut rng = stream_rng(seed, t.bits());
    let mut z = x.to_vec();
    let mut noise = vec![0.0; rest.len()];
    let mut draw = vec![0.0; rest.len()];
    let mut total = 0.0;
    for _ in 0..sample_count {
        sampler.draw_into(&mut rng, &mut noise, &mut draw);
        for (&i, v) in rest.iter().zip(&draw) {
            z[i] = *v;
        }
        total += model.evaluate(&z)?;
    }
    Ok(total / sample_count as f64)
}

/// Scaled Mahalanobis distances `sqrt(d' S^-1 d / |T|)` from `x` to every
/// background row on the coordinates of `T`, with `S` the background
/// covariance of those coordinates.
pub fn mahalanobis_distances(x: &[f64], t: Coalition, background: &SampleMatrix) -> Result<Vec<f64>> {
    Error::check_len("valuefn", background.ncols(), x.len())?;
    let kept: Vec<usize> = t.indices().collect();
    if kept.is_empty() {
        return Err(Error::invalid("valuefn", "distance over an empty coalition"));
    }
    let inv = linalg::pinv_symmetric(&empirical_covariance(background, &kept), "valuefn")?;
    let size = kept.len() as f64;
    let mut d = vec![0.0; kept.len()];
    Ok(background
        .iter_rows()
        .map(|row| {
            for (di, &c) in d.iter_mut().zip(&kept) {
                *di = x[c] - row[c];
            }
            let mut q = 0.0;
            for a in 0..d.len() {
                for b in 0..d.len() {
                    q += d[a] * inv[(a, b)] * d[b];
                }
            }
            (q.max(0.0) / size).sqrt()
        })
        .collect())
}

/// Gaussian kernel weights `exp(-dist^2 / (2 sigma^2))`.
pub fn kernel_weights(x: &[f64], t: Coalition, background: &SampleMatrix, bandwidth: f64) -> Result<Vec<f64>> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidSpec(format!("bandwidth {bandwidth} must be positive")));
    }
    Ok(mahalanobis_distances(x, t, background)?
        .into_iter()
        .map(|d| (-d * d / (2.0 * bandwidth)).exp())
        .collect())
}

/// Kernel-weighted estimate of the conditional value: the weighted mean of
/// `f(x_T, row_rest)` over the `neighbor_count` background rows with the
/// largest kernel weight.
pub fn conditional_kernel_value(
    model: &Model,
    x: &[f64],
    t: Coalition,
    background: &SampleMatrix,
    bandwidth: f64,
    neighbor_count: usize,
) -> Result<f64> {
    check_inputs(model, x, t, background.ncols())?;
    if neighbor_count == 0 {
        return Err(Error::InvalidSpec("neighbor_count must be at least 1".into()));
    }
    if t.is_full() {
        return model.evaluate(x);
    }
    if t.is_empty() {
        return marginal_mc(model, x, t, background, background.nrows(), true, 0);
    }
    let weights = kernel_weights(x, t, background, bandwidth)?;
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // descending weight, ties by row
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    order.truncate(neighbor_count);
    let mut z = vec![0.0; x.len()];
    let (mut num, mut den) = (0.0, 0.0);
    for &r in &order {
        let w = weights[r];
        if w == 0.0 {
            continue;
        }
        t.splice(x, background.row(r), &mut z);
        num += w * model.evaluate(&z)?;
        den += w;
    }
    if den == 0.0 {
        return Err(Error::WeightsUnderflow);
    }
    Ok(num / den)
}

/// Exact value under a finite distribution.
pub fn exact_discrete_value(
    model: &Model,
    x: &[f64],
    t: Coalition,
    dist: &DiscreteDistribution,
    mode: DiscreteMode,
) -> Result<f64> {
    check_inputs(model, x, t, dist.dim())?;
    if t.is_full() {
        return model.evaluate(x);
    }
    let mut z = vec![0.0; x.len()];
    let (mut num, mut mass) = (0.0, 0.0);
    for atom in dist.atoms() {
        if mode == DiscreteMode::Conditional && !t.indices().all(|i| atom.point[i] == x[i]) {
            continue;
        }
        if atom.prob == 0.0 {
            continue;
        }
        t.splice(x, &atom.point, &mut z);
        num += atom.prob * model.evaluate(&z)?;
        mass += atom.prob;
    }
    match mode {
        DiscreteMode::Marginal => Ok(num),
        DiscreteMode::Conditional if mass > 0.0 => Ok(num / mass),
        DiscreteMode::Conditional => Err(Error::ZeroProbability),
    }
}

/// The set function `g(T) = f_T(x) - f_empty(x)` on a collection of
/// coalitions. `g(empty) = 0` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionValueTable {
    n: usize,
    instance: Vec<f64>,
    baseline: f64,
    values: BTreeMap<Coalition, f64>,
}

impl CoalitionValueTable {
    /// Table of a bare set function over all `2^n` coalitions, shifted so
    /// that `g(empty) = 0`.
    pub fn from_set_function(n: usize, mut g: impl FnMut(Coalition) -> f64) -> Self {
        let offset = g(Coalition::empty(n));
        let values = Coalition::all(n)
            .map(|c| (c, if c.is_empty() { 0.0 } else { g(c) - offset }))
            .collect();
        Self {
            n,
            instance: Vec::new(),
            baseline: offset,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn instance(&self) -> &[f64] {
        &self.instance
    }

    /// `f_empty(x)`, the estimate of `E[f(X)]`.
    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn get(&self, t: Coalition) -> Option<f64> {
        self.values.get(&t).copied()
    }

    /// `g(U)`.
    pub fn total(&self) -> f64 {
        self.values[&Coalition::full(self.n)]
    }

    /// `C(i | T) = g(T + i) - g(T)`, for `i` not in `T`.
    pub fn contribution(&self, i: usize, t: Coalition) -> Option<f64> {
        if t.contains(i) {
            return None;
        }
        Some(self.get(t.with(i))? - self.get(t)?)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coalition, f64)> + '_ {
        self.values.iter().map(|(c, v)| (*c, *v))
    }
}

/// Evaluates `g` on `coalitions` (plus the empty and full coalitions).
///
/// Coalitions are evaluated in parallel; every estimator keys its randomness
/// on the coalition, so the table does not depend on scheduling.
pub fn build_value_table(
    model: &Model,
    x: &[f64],
    spec: &ValueFunctionSpec,
    coalitions: &[Coalition],
) -> Result<CoalitionValueTable> {
    spec.validate()?;
    let n = model.arity();
    Error::check_len("valuefn", n, x.len())?;
    Error::check_len("valuefn", n, spec.dim())?;
    if let Some(c) = coalitions.iter().find(|c| c.n() != n) {
        return Err(Error::DimensionMismatch {
            context: "valuefn",
            expected: n,
            actual: c.n(),
        });
    }
    let mut wanted: Vec<Coalition> = coalitions.to_vec();
    wanted.push(Coalition::full(n));
    wanted.sort();
    wanted.dedup();
    wanted.retain(|c| !c.is_empty());

    let baseline = spec.value(model, x, Coalition::empty(n))?;
    let computed: Vec<(Coalition, f64)> = wanted
        .par_iter()
        .map(|&c| spec.value(model, x, c).map(|v| (c, v - baseline)))
        .collect::<Result<_>>()?;
    let mut values: BTreeMap<Coalition, f64> = computed.into_iter().collect();
    values.insert(Coalition::empty(n), 0.0);
    Ok(CoalitionValueTable {
        n,
        instance: x.to_vec(),
        baseline,
        values,
    })
}
