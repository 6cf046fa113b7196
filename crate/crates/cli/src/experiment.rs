//! Linear-ground-truth experiments: Shapley estimates under different value
//! functions are compared with the exact linear attribution
//! `alpha_j (x_j - E[X_j])`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use attrib_core::data::{make_rank1_gaussian, sample_gaussian};
use attrib_core::model::fit_linear_ols;
use attrib_core::rng::{derive_seed, stream_rng};
use attrib_core::shapley::explain;
use attrib_core::valuefn::{DEFAULT_BANDWIDTH, DEFAULT_NEIGHBOR_COUNT, DEFAULT_SAMPLE_COUNT};
use attrib_core::{CoalitionMode, LinearModel, Model, SampleMatrix, ValueFunctionSpec};
use rand::seq::index::sample as sample_indices;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::explain::ValueKind;

pub const DEFAULT_RUNS: usize = 200;
pub const DEFAULT_BUDGET: usize = 2048;
pub const KERNEL_BACKGROUND_ROWS: usize = 1000;
pub const OLS_RETRIES: usize = 10;

/// Configuration of the rank-1 Gaussian experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dims: usize,
    /// 0-based features whose true coefficient is forced to zero.
    pub zero_coefficient_indices: Vec<usize>,
    pub runs: usize,
    pub sample_count: usize,
    pub coalition_budget: usize,
    pub value_kinds: Vec<ValueKind>,
    pub seed: u64,
    /// Draw the instance uniformly on `[-2, 2]^n` instead of from the Gaussian.
    pub uniform_instance: bool,
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn gaussian(dims: usize, zero_coefficient_indices: Vec<usize>, runs: usize, seed: u64) -> Self {
        Self {
            dims,
            zero_coefficient_indices,
            runs,
            sample_count: DEFAULT_SAMPLE_COUNT,
            coalition_budget: DEFAULT_BUDGET,
            value_kinds: vec![ValueKind::Marginal, ValueKind::CondGauss],
            seed,
            uniform_instance: false,
            workers: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.dims == 0 || self.dims > attrib_core::shapley::MAX_EXACT_FEATURES {
            return Err(CliError::usage(format!("--dims {} out of range", self.dims)));
        }
        if self.runs == 0 {
            return Err(CliError::usage("--runs must be at least 1"));
        }
        if self.sample_count == 0 {
            return Err(CliError::usage("--samples must be at least 1"));
        }
        if let Some(&i) = self.zero_coefficient_indices.iter().find(|&&i| i >= self.dims) {
            return Err(CliError::usage(format!(
                "zero coefficient index {} exceeds --dims",
                i + 1
            )));
        }
        if let Some(k) = self
            .value_kinds
            .iter()
            .find(|k| !matches!(k, ValueKind::Marginal | ValueKind::CondGauss))
        {
            return Err(CliError::usage(format!(
                "value function {} not available here",
                k.label()
            )));
        }
        Ok(())
    }
}

/// Configuration of the kernel-conditional experiment on a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub runs: usize,
    pub bandwidth: f64,
    pub neighbor_count: usize,
    pub background_rows: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl KernelConfig {
    pub fn new(runs: usize, seed: u64) -> Self {
        Self {
            runs,
            bandwidth: DEFAULT_BANDWIDTH,
            neighbor_count: DEFAULT_NEIGHBOR_COUNT,
            background_rows: KERNEL_BACKGROUND_ROWS,
            seed,
            workers: None,
        }
    }
}

/// One attribution error; `feature` is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub run: usize,
    pub feature: usize,
    pub method: String,
    pub phi: f64,
    pub truth: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub run: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub records: usize,
    pub mae: f64,
    pub max_abs_error: f64,
    /// Over features whose true coefficient is zero.
    pub mae_zero_coef: Option<f64>,
    pub max_abs_error_zero_coef: Option<f64>,
    /// Worst `|sum phi - (f(x) - baseline)|` over runs.
    pub max_efficiency_residual: f64,
    pub coalitions_per_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub runs: usize,
    pub completed_runs: usize,
    pub failures: Vec<RunFailure>,
    pub methods: Vec<MethodSummary>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn method(&self, label: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == label)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// Sorted by `(run, feature, method)`.
    pub records: Vec<ErrorRecord>,
    pub summary: Summary,
}

struct RunOutcome {
    records: Vec<ErrorRecord>,
    residuals: Vec<(String, f64)>,
    coalitions: Vec<(String, usize)>,
    zero_features: Vec<usize>,
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(CliError::usage("--workers must be at least 1")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::usage(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// One explained instance with its ground truth.
struct Case<'a> {
    run: usize,
    model: &'a Model,
    x: &'a [f64],
    truth: &'a [f64],
    mode: CoalitionMode,
}

fn attribute(case: &Case, label: &str, spec: &ValueFunctionSpec, out: &mut RunOutcome) -> CliResult<()> {
    let Case {
        run,
        model,
        x,
        truth,
        mode,
    } = *case;
    let res = explain(model, x, spec, mode)?;
    let fx = model.evaluate(x)?;
    out.residuals
        .push((label.into(), (res.sum() - (fx - res.baseline)).abs()));
    out.coalitions.push((label.into(), res.coalitions_evaluated));
    for (j, (&phi, &t)) in res.phi.iter().zip(truth).enumerate() {
        out.records.push(ErrorRecord {
            run,
            feature: j + 1,
            method: label.into(),
            phi,
            truth: t,
            error: phi - t,
        });
    }
    Ok(())
}

fn gaussian_run(cfg: &ExperimentConfig, run: usize) -> CliResult<RunOutcome> {
    let n = cfg.dims;
    let run_seed = derive_seed(cfg.seed, run as u64);
    let mut rng = stream_rng(run_seed, 0);
    let alpha: Vec<f64> = (0..n)
        .map(|i| {
            let a: f64 = rng.sample(StandardNormal);
            if cfg.zero_coefficient_indices.contains(&i) {
                0.0
            } else {
                a
            }
        })
        .collect();
    let linear = LinearModel::new(0.0, alpha);
    let gaussian = make_rank1_gaussian(n, derive_seed(run_seed, 1))?;
    let x: Vec<f64> = if cfg.uniform_instance {
        (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
    } else {
        let mut z = vec![0.0; n];
        let mut x = vec![0.0; n];
        gaussian.sampler()?.draw_into(&mut rng, &mut z, &mut x);
        x
    };
    let means: Vec<f64> = gaussian.mean().iter().copied().collect();
    let truth = linear.analytic_attribution(&x, &means)?;
    let model = Model::Linear(linear);
    let mode = if n < 64 && cfg.coalition_budget as u128 >= 1u128 << n {
        CoalitionMode::Exact
    } else {
        CoalitionMode::Wls {
            budget: cfg.coalition_budget,
            seed: derive_seed(run_seed, 3),
        }
    };

    let mut out = RunOutcome {
        records: Vec::new(),
        residuals: Vec::new(),
        coalitions: Vec::new(),
        zero_features: cfg.zero_coefficient_indices.clone(),
    };
    let case = Case {
        run,
        model: &model,
        x: &x,
        truth: &truth,
        mode,
    };
    for &kind in &cfg.value_kinds {
        let spec = match kind {
            ValueKind::Marginal => {
                let background = sample_gaussian(&gaussian, cfg.sample_count, derive_seed(run_seed, 2))?;
                ValueFunctionSpec::marginal(background, derive_seed(run_seed, 4))
            }
            ValueKind::CondGauss => {
                ValueFunctionSpec::conditional_gaussian(gaussian.clone(), cfg.sample_count, derive_seed(run_seed, 5))
            }
            other => {
                return Err(CliError::usage(format!(
                    "value function {} not available here",
                    other.label()
                )))
            }
        };
        attribute(&case, kind.label(), &spec, &mut out)?;
    }
    Ok(out)
}

/// Rank-1 Gaussian experiment: random linear model, `Sigma = c c^T`.
pub fn run_gaussian(cfg: &ExperimentConfig) -> CliResult<ExperimentOutput> {
    cfg.validate()?;
    let outcomes = in_pool(cfg.workers, || {
        (0..cfg.runs)
            .into_par_iter()
            .map(|r| gaussian_run(cfg, r))
            .collect::<Vec<_>>()
    })?;
    let labels: Vec<String> = cfg.value_kinds.iter().map(|k| k.label().to_string()).collect();
    Ok(assemble(
        format!("gaussian n={}", cfg.dims),
        cfg.runs,
        &labels,
        outcomes,
        Vec::new(),
    ))
}

fn kernel_run(cfg: &KernelConfig, data: &SampleMatrix, run: usize) -> CliResult<RunOutcome> {
    let run_seed = derive_seed(cfg.seed, run as u64);
    let mut rng = stream_rng(run_seed, 0);
    let mut last_err = None;
    let mut fitted = None;
    for _ in 0..=OLS_RETRIES {
        let cols = sample_indices(&mut rng, data.ncols(), 4).into_vec();
        match fit_linear_ols(&data.select_columns(&cols)?, 3) {
            Ok(m) => {
                fitted = Some((cols, m));
                break;
            }
            Err(e @ attrib_core::Error::Singular { .. }) => last_err = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    let (cols, linear) = match fitted {
        Some(f) => f,
        None => return Err(last_err.expect("at least one attempt").into()),
    };
    let predictors = data.select_columns(&cols[..3])?;
    let background = predictors.head(cfg.background_rows.min(predictors.nrows()));
    let x = predictors.row(rng.random_range(0..predictors.nrows())).to_vec();
    let truth = linear.analytic_attribution(&x, &predictors.mean())?;
    let model = Model::Linear(linear);

    let mut out = RunOutcome {
        records: Vec::new(),
        residuals: Vec::new(),
        coalitions: Vec::new(),
        zero_features: Vec::new(),
    };
    let case = Case {
        run,
        model: &model,
        x: &x,
        truth: &truth,
        mode: CoalitionMode::Exact,
    };
    let marginal = ValueFunctionSpec::marginal(background.clone(), derive_seed(run_seed, 4));
    attribute(&case, ValueKind::Marginal.label(), &marginal, &mut out)?;
    let kernel = ValueFunctionSpec::conditional_kernel(background, cfg.bandwidth, cfg.neighbor_count);
    attribute(&case, ValueKind::CondKernel.label(), &kernel, &mut out)?;
    Ok(out)
}

/// Kernel-conditional experiment: per run, a 3-predictor OLS model on four
/// random columns, explained on the first background rows.
pub fn run_kernel(cfg: &KernelConfig, data: &SampleMatrix) -> CliResult<ExperimentOutput> {
    if cfg.runs == 0 {
        return Err(CliError::usage("--runs must be at least 1"));
    }
    if data.ncols() < 4 {
        return Err(CliError::usage(format!(
            "dataset has {} columns, need at least 4",
            data.ncols()
        )));
    }
    let mut notes = Vec::new();
    if data.nrows() <= cfg.background_rows {
        notes.push(format!(
            "dataset has only {} rows; all rows serve as background",
            data.nrows()
        ));
    }
    let outcomes = in_pool(cfg.workers, || {
        (0..cfg.runs)
            .into_par_iter()
            .map(|r| kernel_run(cfg, data, r))
            .collect::<Vec<_>>()
    })?;
    let labels = vec![
        ValueKind::Marginal.label().to_string(),
        ValueKind::CondKernel.label().to_string(),
    ];
    Ok(assemble("kernel".into(), cfg.runs, &labels, outcomes, notes))
}

fn assemble(
    experiment: String,
    runs: usize,
    labels: &[String],
    outcomes: Vec<CliResult<RunOutcome>>,
    notes: Vec<String>,
) -> ExperimentOutput {
    #[derive(Default)]
    struct Acc {
        n: usize,
        sum: f64,
        max: f64,
        zn: usize,
        zsum: f64,
        zmax: f64,
        residual: f64,
        coalitions: usize,
    }
    let mut acc: BTreeMap<&str, Acc> = labels.iter().map(|l| (l.as_str(), Acc::default())).collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut completed = 0;
    for (run, outcome) in outcomes.into_iter().enumerate() {
        let o = match outcome {
            Ok(o) => o,
            Err(e) => {
                failures.push(RunFailure {
                    run,
                    message: e.to_string(),
                });
                continue;
            }
        };
        completed += 1;
        for (label, r) in &o.residuals {
            if let Some(a) = acc.get_mut(label.as_str()) {
                a.residual = a.residual.max(*r);
            }
        }
        for (label, c) in &o.coalitions {
            if let Some(a) = acc.get_mut(label.as_str()) {
                a.coalitions = a.coalitions.max(*c);
            }
        }
        for rec in &o.records {
            if let Some(a) = acc.get_mut(rec.method.as_str()) {
                let e = rec.error.abs();
                a.n += 1;
                a.sum += e;
                a.max = a.max.max(e);
                if o.zero_features.contains(&(rec.feature - 1)) {
                    a.zn += 1;
                    a.zsum += e;
                    a.zmax = a.zmax.max(e);
                }
            }
        }
        records.extend(o.records);
    }
    records.sort_by(|a, b| (a.run, a.feature, &a.method).cmp(&(b.run, b.feature, &b.method)));
    let methods = labels
        .iter()
        .map(|l| {
            let a = &acc[l.as_str()];
            MethodSummary {
                method: l.clone(),
                records: a.n,
                mae: if a.n > 0 { a.sum / a.n as f64 } else { f64::NAN },
                max_abs_error: a.max,
                mae_zero_coef: (a.zn > 0).then(|| a.zsum / a.zn as f64),
                max_abs_error_zero_coef: (a.zn > 0).then_some(a.zmax),
                max_efficiency_residual: a.residual,
                coalitions_per_run: a.coalitions,
            }
        })
        .collect();
    ExperimentOutput {
        records,
        summary: Summary {
            experiment,
            runs,
            completed_runs: completed,
            failures,
            methods,
            notes,
        },
    }
}

/// Writes records with the header `run,feature,method,phi,truth,error`.
pub fn write_records<W: Write>(records: &[ErrorRecord], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| CliError::Core(attrib_core::Error::Csv(e.to_string())))?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> CliResult<Vec<ErrorRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Core(attrib_core::Error::Csv(e.to_string()))
}

/// Writes a matrix as CSV with a header row (`x1..xn` when unnamed).
pub fn write_matrix<W: Write>(data: &SampleMatrix, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = match data.names() {
        Some(n) => n.to_vec(),
        None => (1..=data.ncols()).map(|i| format!("x{i}")).collect(),
    };
    w.write_record(&header).map_err(csv_err)?;
    for row in data.iter_rows() {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| CliError::Core(attrib_core::Error::Csv(e.to_string())))?;
    Ok(())
}

/// Synthetic dataset where a hidden label drives every column.
///
/// Columns 1-3, 5 and 6 load on a standard normal factor with independent
/// noise; column 4 is exactly `2 c1 - c2 + 3`.
pub fn synthetic_common_factor(rows: usize, seed: u64) -> CliResult<SampleMatrix> {
    const LOADINGS: [f64; 5] = [0.9, 0.8, 0.7, 0.6, 0.5];
    const NOISE: f64 = 0.4;
    let mut rng = stream_rng(seed, 0);
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let y: f64 = rng.sample(StandardNormal);
        let f: Vec<f64> = LOADINGS
            .iter()
            .map(|l| {
                let e: f64 = rng.sample(StandardNormal);
                l * y + NOISE * e
            })
            .collect();
        out.push(vec![f[0], f[1], f[2], 2.0 * f[0] - f[1] + 3.0, f[3], f[4]]);
    }
    let names = (1..=6).map(|i| format!("c{i}")).collect();
    Ok(SampleMatrix::from_rows(out)?.with_names(names)?)
}

/// Fixed-width text histogram of `values`.
pub fn text_histogram(values: &[f64], bins: usize, width: usize) -> String {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() || bins == 0 {
        return String::from("(no data)\n");
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in &finite {
        let b = (((v - lo) / span) * bins as f64) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(1).max(1);
    let mut s = String::new();
    for (b, &c) in counts.iter().enumerate() {
        let left = lo + span * b as f64 / bins as f64;
        let bar = "#".repeat((c * width).div_ceil(top));
        s.push_str(&format!("{left:>12.4e} | {bar:<width$} {c}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_shape() {
        let h = text_histogram(&[0.0, 0.1, 0.1, 1.0], 2, 10);
        let lines: Vec<&str> = h.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].ends_with(" 3"));
        assert!(lines[1].ends_with(" 1"));
        assert_eq!(text_histogram(&[], 3, 5), "(no data)\n");
    }

    #[test]
    fn synthetic_dependency() {
        let d = synthetic_common_factor(50, 1).unwrap();
        for r in d.iter_rows() {
            assert!((r[3] - (2.0 * r[0] - r[1] + 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ols_recovers_dependency() {
        let d = synthetic_common_factor(200, 2).unwrap();
        let m = fit_linear_ols(&d.select_columns(&[0, 1, 2, 3]).unwrap(), 3).unwrap();
        assert!((m.intercept - 3.0).abs() < 1e-8);
        let expect = [2.0, -1.0, 0.0];
        for (c, e) in m.coefficients.iter().zip(expect) {
            assert!((c - e).abs() < 1e-8, "{:?}", m.coefficients);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::gaussian(3, vec![0], 1, 0);
        assert!(c.validate().is_ok());
        c.zero_coefficient_indices = vec![3];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::gaussian(3, vec![], 1, 0);
        c.value_kinds = vec![ValueKind::CondKernel];
        assert!(c.validate().is_err());
    }

    #[test]
    fn gaussian_small_run() {
        let mut c = ExperimentConfig::gaussian(3, vec![0], 3, 7);
        c.sample_count = 200;
        let out = run_gaussian(&c).unwrap();
        assert_eq!(out.records.len(), 3 * 3 * 2);
        assert!(out.summary.failures.is_empty());
        for r in &out.records {
            assert_eq!(r.error, r.phi - r.truth);
            if r.feature == 1 && r.method == "marginal" {
                assert!(r.error.abs() < 1e-10);
            }
        }
    }
}
