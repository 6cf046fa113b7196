//! Path attributions (integrated gradients) and an axiom verifier that
//! checks Completeness, Sensitivity, Linearity and Symmetry-Preserving for
//! either integrated gradients or Shapley values under a value function.

use std::collections::{BTreeMap, HashMap};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::data::GaussianSpec;
use crate::error::{Error, Result};
use crate::model::{BinaryOp, Expr, Model, DEFAULT_FD_STEP};
use crate::rng::{stream_rng, Rng};
use crate::shapley::{explain, shapley_exact, CoalitionMode};
use crate::valuefn::{CoalitionValueTable, ValueFunctionSpec};

/// Trapezoid panels per path segment.
pub const DEFAULT_STEPS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    StraightLine,
    Piecewise,
}

/// Piecewise-linear path from a baseline (first waypoint) to the input
/// (last waypoint), integrated with `steps` trapezoid panels per segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    kind: PathKind,
    waypoints: Vec<Vec<f64>>,
    steps: usize,
}

impl PathSpec {
    pub fn straight(baseline: &[f64], x: &[f64], steps: usize) -> Result<Self> {
        Self::build(PathKind::StraightLine, vec![baseline.to_vec(), x.to_vec()], steps)
    }

    pub fn piecewise(waypoints: Vec<Vec<f64>>, steps: usize) -> Result<Self> {
        Self::build(PathKind::Piecewise, waypoints, steps)
    }

    fn build(kind: PathKind, waypoints: Vec<Vec<f64>>, steps: usize) -> Result<Self> {
        let n = waypoints
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("intgrad", "path needs at least one waypoint"))?;
        if let Some(w) = waypoints.iter().find(|w| w.len() != n) {
            return Err(Error::DimensionMismatch {
                context: "intgrad",
                expected: n,
                actual: w.len(),
            });
        }
        if steps == 0 {
            return Err(Error::invalid("intgrad", "steps must be at least 1"));
        }
        Ok(Self { kind, waypoints, steps })
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn baseline(&self) -> &[f64] {
        &self.waypoints[0]
    }

    pub fn input(&self) -> &[f64] {
        self.waypoints.last().expect("nonempty")
    }

    pub fn waypoints(&self) -> &[Vec<f64>] {
        &self.waypoints
    }
}

fn gradient_at(model: &Model, point: &[f64], alpha: f64) -> Result<Vec<f64>> {
    model.gradient_fd(point, DEFAULT_FD_STEP).map_err(|e| Error::NonFinite {
        context: "intgrad",
        detail: format!("gradient at alpha = {alpha}: {e}"),
    })
}

/// Line integral of the gradient along the path; coordinate `i` collects
/// `df/dx_i * dx_i` over every segment.
pub fn path_attribution(model: &Model, path: &PathSpec) -> Result<Vec<f64>> {
    let n = path.baseline().len();
    Error::check_len("intgrad", model.arity(), n)?;
    let m = path.steps;
    let mut attr = vec![0.0; n];
    let mut point = vec![0.0; n];
    let segments = path.waypoints.len().saturating_sub(1);
    for (s, pair) in path.waypoints.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let delta: Vec<f64> = b.iter().zip(a).map(|(bi, ai)| bi - ai).collect();
        if delta.iter().all(|d| *d == 0.0) {
            continue;
        }
        let mut integral = vec![0.0; n];
        for k in 0..=m {
            let t = k as f64 / m as f64;
            for i in 0..n {
                point[i] = a[i] + t * delta[i];
            }
            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
            let alpha = (s as f64 + t) / segments as f64;
            let g = gradient_at(model, &point, alpha)?;
            for i in 0..n {
                integral[i] += w * g[i];
            }
        }
        for i in 0..n {
            attr[i] += delta[i] * integral[i] / m as f64;
        }
    }
    Ok(attr)
}

/// `(x_i - x'_i) * integral_0^1 df/dx_i(x' + a (x - x')) da`, trapezoid rule.
pub fn integrated_gradients(model: &Model, x: &[f64], baseline: &[f64], steps: usize) -> Result<Vec<f64>> {
    Error::check_len("intgrad", model.arity(), x.len())?;
    Error::check_len("intgrad", model.arity(), baseline.len())?;
    path_attribution(model, &PathSpec::straight(baseline, x, steps)?)
}

/// Attribution procedure under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum AttributionMethod {
    IntegratedGradients { steps: usize },
    Shapley { value_fn: ValueFunctionSpec },
}

impl AttributionMethod {
    pub fn name(&self) -> String {
        match self {
            AttributionMethod::IntegratedGradients { .. } => "integrated-gradients".into(),
            AttributionMethod::Shapley { value_fn } => format!("shapley/{}", value_fn.kind_name()),
        }
    }

    /// Attributions and the reference value they should sum against.
    fn attribute(&self, model: &Model, x: &[f64], baseline: &[f64]) -> Result<(Vec<f64>, f64)> {
        match self {
            AttributionMethod::IntegratedGradients { steps } => {
                let a = integrated_gradients(model, x, baseline, *steps)?;
                Ok((a, model.evaluate(baseline)?))
            }
            AttributionMethod::Shapley { value_fn } => {
                let r = explain(model, x, value_fn, CoalitionMode::Exact)?;
                Ok((r.phi, r.baseline))
            }
        }
    }
}

/// Where an axiom was violated worst.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub model: String,
    pub x: Vec<f64>,
    pub attribution: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub holds: bool,
    pub worst_violation: f64,
    /// Number of (model, input) cases the axiom applied to.
    pub cases: usize,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            holds: true,
            worst_violation: 0.0,
            cases: 0,
            witness: None,
        }
    }

    fn record(&mut self, violation: f64, witness: impl FnOnce() -> Witness) {
        self.cases += 1;
        if violation > self.worst_violation || (violation.is_nan() && !self.worst_violation.is_nan()) {
            self.worst_violation = violation;
            self.witness = Some(witness());
        }
    }

    fn finish(&mut self, tolerance: f64) {
        self.holds = self.worst_violation <= tolerance;
        if self.holds {
            self.witness = None;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub method: String,
    pub tolerance: f64,
    pub axioms: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.axioms.iter().all(|a| a.holds)
    }
}

pub const COMPLETENESS: &str = "completeness";
pub const SENSITIVITY: &str = "sensitivity";
pub const LINEARITY: &str = "linearity";
pub const SYMMETRY: &str = "symmetry-preserving";

/// Whether `f(x) = f(x with i and j swapped)`: exact for linear models,
/// probed at random points for expressions.
fn is_symmetric(model: &Model, i: usize, j: usize, rng: &mut Rng) -> bool {
    match model {
        Model::Linear(m) => m.coefficients[i] == m.coefficients[j],
        Model::Expr { arity, expr } => {
            let swapped = expr.swap_vars(i, j);
            (0..8).all(|_| {
                let x: Vec<f64> = (0..*arity).map(|_| rng.random_range(-2.0..2.0)).collect();
                match (expr.eval(&x), swapped.eval(&x)) {
                    (Ok(a), Ok(b)) => (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                    _ => false,
                }
            })
        }
    }
}

fn rows_exchangeable(rows: &[Vec<f64>], i: usize, j: usize) -> bool {
    let key = |r: &Vec<f64>| r.iter().map(|v| v.to_bits()).collect::<Vec<u64>>();
    let mut a: Vec<Vec<u64>> = rows.iter().map(key).collect();
    let mut b: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.swap(i, j);
            key(&r)
        })
        .collect();
    a.sort();
    b.sort();
    a == b
}

fn gaussian_exchangeable(g: &GaussianSpec, i: usize, j: usize) -> bool {
    let (mu, s) = (g.mean(), g.cov());
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    close(mu[i], mu[j])
        && close(s[(i, i)], s[(j, j)])
        && (0..g.dim())
            .filter(|&k| k != i && k != j)
            .all(|k| close(s[(i, k)], s[(j, k)]))
}

/// Whether the feature distribution is invariant under swapping `i` and `j`.
pub fn exchangeable(spec: &ValueFunctionSpec, i: usize, j: usize) -> bool {
    match spec {
        ValueFunctionSpec::MarginalMc { background, .. } | ValueFunctionSpec::ConditionalKernel { background, .. } => {
            rows_exchangeable(&background.iter_rows().map(<[f64]>::to_vec).collect::<Vec<_>>(), i, j)
        }
        ValueFunctionSpec::ConditionalGaussian { gaussian, .. } => gaussian_exchangeable(gaussian, i, j),
        ValueFunctionSpec::ExactDiscreteMarginal { discrete }
        | ValueFunctionSpec::ExactDiscreteConditional { discrete } => discrete.atoms().iter().all(|a| {
            let mut p = a.point.clone();
            p.swap(i, j);
            discrete
                .atoms()
                .iter()
                .any(|b| b.point == p && (b.prob - a.prob).abs() <= 1e-12)
        }),
    }
}

/// Random instance with positive probability under the spec's distribution.
fn draw_instance(spec: &ValueFunctionSpec, rng: &mut Rng, tie: Option<(usize, usize)>) -> Result<Option<Vec<f64>>> {
    let tied = |x: &[f64]| tie.is_none_or(|(i, j)| x[i] == x[j]);
    let pick = |cands: Vec<Vec<f64>>, rng: &mut Rng| {
        if cands.is_empty() {
            None
        } else {
            let k = rng.random_range(0..cands.len());
            Some(cands[k].clone())
        }
    };
    Ok(match spec {
        ValueFunctionSpec::MarginalMc { background, .. } | ValueFunctionSpec::ConditionalKernel { background, .. } => {
            let cands: Vec<Vec<f64>> = background
                .iter_rows()
                .filter(|r| tied(r))
                .map(<[f64]>::to_vec)
                .collect();
            pick(cands, rng)
        }
        ValueFunctionSpec::ConditionalGaussian { gaussian, .. } => {
            let sampler = gaussian.sampler()?;
            let n = gaussian.dim();
            let mut z = vec![0.0; n];
            let mut x = vec![0.0; n];
            sampler.draw_into(rng, &mut z, &mut x);
            if let Some((i, j)) = tie {
                x[j] = x[i];
            }
            Some(x)
        }
        ValueFunctionSpec::ExactDiscreteMarginal { discrete }
        | ValueFunctionSpec::ExactDiscreteConditional { discrete } => {
            let cands: Vec<Vec<f64>> = discrete
                .atoms()
                .iter()
                .filter(|a| a.prob > 0.0 && tied(&a.point))
                .map(|a| a.point.clone())
                .collect();
            pick(cands, rng)
        }
    })
}

/// Checks the four testable axioms of `method` on `models` over `trials`
/// random inputs.
///
/// Sensitivity applies to coordinates a model never mentions. Symmetry
/// applies to model-symmetric pairs `(i, j)` evaluated at inputs with
/// `x_i = x_j`; for integrated gradients the baseline is tied the same way,
/// for Shapley values the feature distribution must be exchangeable in
/// `(i, j)`. Linearity compares consecutive model pairs under random
/// coefficients.
pub fn verify_axioms(
    method: &AttributionMethod,
    models: &[Model],
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::invalid("intgrad", "trials must be at least 1"));
    }
    let n = models
        .first()
        .map(Model::arity)
        .ok_or_else(|| Error::invalid("intgrad", "no models to verify"))?;
    if let Some(m) = models.iter().find(|m| m.arity() != n) {
        return Err(Error::DimensionMismatch {
            context: "intgrad",
            expected: n,
            actual: m.arity(),
        });
    }
    if let AttributionMethod::Shapley { value_fn } = method {
        Error::check_len("intgrad", n, value_fn.dim())?;
    }

    let mut probe = stream_rng(seed, u64::MAX);
    let symmetric_pairs: Vec<Vec<(usize, usize)>> = models
        .iter()
        .map(|m| {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let premise = match method {
                        AttributionMethod::IntegratedGradients { .. } => true,
                        AttributionMethod::Shapley { value_fn } => exchangeable(value_fn, i, j),
                    };
                    if premise && is_symmetric(m, i, j, &mut probe) {
                        pairs.push((i, j));
                    }
                }
            }
            pairs
        })
        .collect();

    let mut completeness = AxiomCheck::new(COMPLETENESS);
    let mut sensitivity = AxiomCheck::new(SENSITIVITY);
    let mut linearity = AxiomCheck::new(LINEARITY);
    let mut symmetry = AxiomCheck::new(SYMMETRY);

    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial as u64);
        let uniform = |rng: &mut Rng| -> Vec<f64> { (0..n).map(|_| rng.random_range(-2.0..2.0)).collect() };
        let (x, baseline) = match method {
            AttributionMethod::IntegratedGradients { .. } => (uniform(&mut rng), uniform(&mut rng)),
            AttributionMethod::Shapley { value_fn } => match draw_instance(value_fn, &mut rng, None)? {
                Some(x) => (x, vec![0.0; n]),
                None => continue,
            },
        };

        let mut attributions = Vec::with_capacity(models.len());
        for (mi, model) in models.iter().enumerate() {
            let (attr, reference) = method.attribute(model, &x, &baseline)?;
            let fx = model.evaluate(&x)?;
            let gap = (attr.iter().sum::<f64>() - (fx - reference)).abs();
            completeness.record(gap, || Witness {
                model: model.to_expr().to_string(),
                x: x.clone(),
                attribution: attr.clone(),
                detail: format!(
                    "sum = {}, f(x) - reference = {}",
                    attr.iter().sum::<f64>(),
                    fx - reference
                ),
            });
            for i in (0..n).filter(|&i| !model.mentions(i)) {
                sensitivity.record(attr[i].abs(), || Witness {
                    model: model.to_expr().to_string(),
                    x: x.clone(),
                    attribution: attr.clone(),
                    detail: format!("model ignores x{} but its attribution is {}", i + 1, attr[i]),
                });
            }
            for &(i, j) in &symmetric_pairs[mi] {
                let (xs, bs) = match method {
                    AttributionMethod::IntegratedGradients { .. } => {
                        let mut xs = x.clone();
                        let mut bs = baseline.clone();
                        xs[j] = xs[i];
                        bs[j] = bs[i];
                        (xs, bs)
                    }
                    AttributionMethod::Shapley { value_fn } => match draw_instance(value_fn, &mut rng, Some((i, j)))? {
                        Some(xs) => (xs, baseline.clone()),
                        None => continue,
                    },
                };
                let (a, _) = method.attribute(model, &xs, &bs)?;
                symmetry.record((a[i] - a[j]).abs(), || Witness {
                    model: model.to_expr().to_string(),
                    x: xs.clone(),
                    attribution: a.clone(),
                    detail: format!(
                        "x{} and x{} are interchangeable but attributed differently",
                        i + 1,
                        j + 1
                    ),
                });
            }
            attributions.push(attr);
        }

        for k in 0..models.len().saturating_sub(1) {
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let combo = Model::linear_combination(a, &models[k], b, &models[k + 1])?;
            let (attr, _) = method.attribute(&combo, &x, &baseline)?;
            let worst = attr
                .iter()
                .enumerate()
                .map(|(i, v)| (v - (a * attributions[k][i] + b * attributions[k + 1][i])).abs())
                .fold(0.0, f64::max);
            linearity.record(worst, || Witness {
                model: combo.to_expr().to_string(),
                x: x.clone(),
                attribution: attr.clone(),
                detail: format!("combination {a} * model {} + {b} * model {}", k + 1, k + 2),
            });
        }
    }

    let mut axioms = vec![completeness, sensitivity, linearity, symmetry];
    axioms.iter_mut().for_each(|a| a.finish(tolerance));
    Ok(AxiomReport {
        method: method.name(),
        tolerance,
        axioms,
    })
}

/// Random polynomial of degree at most three in `n` variables, never
/// mentioning the variables in `omit`.
pub fn random_polynomial(n: usize, omit: &[usize], rng: &mut Rng) -> Result<Model> {
    let active: Vec<usize> = (0..n).filter(|i| !omit.contains(i)).collect();
    let mut expr = Expr::Const(rng.random_range(-1.0..1.0));
    if !active.is_empty() {
        for _ in 0..rng.random_range(2..=4) {
            let mut term = Expr::Const(rng.random_range(-2.0..2.0));
            for _ in 0..rng.random_range(1..=3) {
                let v = active[rng.random_range(0..active.len())];
                term = Expr::binary(BinaryOp::Mul, term, Expr::Var(v));
            }
            expr = Expr::binary(BinaryOp::Add, expr, term);
        }
    }
    Model::from_expr(expr, n)
}

/// `p(x) + p(x with i and j swapped)`, symmetric in `(i, j)`.
pub fn symmetrize_model(model: &Model, i: usize, j: usize) -> Result<Model> {
    let e = model.to_expr();
    let swapped = e.swap_vars(i, j);
    Model::from_expr(Expr::binary(BinaryOp::Add, e, swapped), model.arity())
}

/// Set-function level checks of exact Shapley values on random games:
/// efficiency, null player, symmetry and linearity.
///
/// Null players and symmetric pairs are planted by construction, so these
/// properties must hold up to rounding for any value function.
pub fn verify_set_function_axioms(trials: usize, max_n: usize, seed: u64, tolerance: f64) -> Result<AxiomReport> {
    let mut efficiency = AxiomCheck::new("efficiency");
    let mut null_player = AxiomCheck::new("null-player");
    let mut symmetry = AxiomCheck::new("symmetry");
    let mut linearity = AxiomCheck::new("linearity");
    let witness = |n: usize, phi: &[f64], detail: String| Witness {
        model: format!("random set function over {n} players"),
        x: Vec::new(),
        attribution: phi.to_vec(),
        detail,
    };
    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial as u64);
        let n = rng.random_range(2..=max_n.max(2));
        let null = rng.random_range(0..n);
        let (a, b) = loop {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b && a != null && b != null {
                break (a, b);
            }
            if n < 3 {
                break (usize::MAX, usize::MAX);
            }
        };
        // values keyed on the coalition with the null player removed and
        // the symmetric pair reduced to its member count
        let mut cache: HashMap<(u64, u32), f64> = HashMap::new();
        let key = |c: Coalition| {
            let mut c = c.without(null);
            let mut pair = 0;
            if a != usize::MAX {
                pair = c.contains(a) as u32 + c.contains(b) as u32;
                c = c.without(a).without(b);
            }
            (c.bits(), pair)
        };
        let game = |rng: &mut Rng, cache: &mut HashMap<(u64, u32), f64>| {
            cache.clear();
            CoalitionValueTable::from_set_function(n, |c| {
                *cache.entry(key(c)).or_insert_with(|| rng.random_range(-3.0..3.0))
            })
        };
        let g1 = game(&mut rng, &mut cache);
        let g2 = game(&mut rng, &mut cache);
        let (s, t) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let mix = CoalitionValueTable::from_set_function(n, |c| s * g1.get(c).unwrap() + t * g2.get(c).unwrap());
        let p1 = shapley_exact(&g1)?.phi;
        let p2 = shapley_exact(&g2)?.phi;
        let pm = shapley_exact(&mix)?.phi;

        let gap = (p1.iter().sum::<f64>() - g1.total()).abs();
        efficiency.record(gap, || {
            witness(n, &p1, format!("sum {} vs g(U) {}", p1.iter().sum::<f64>(), g1.total()))
        });
        null_player.record(p1[null].abs(), || {
            witness(n, &p1, format!("null player {} got {}", null + 1, p1[null]))
        });
        if a != usize::MAX {
            symmetry.record((p1[a] - p1[b]).abs(), || {
                witness(n, &p1, format!("players {} and {}", a + 1, b + 1))
            });
        }
        let worst = (0..n)
            .map(|i| (pm[i] - (s * p1[i] + t * p2[i])).abs())
            .fold(0.0, f64::max);
        linearity.record(worst, || witness(n, &pm, format!("{s} * g1 + {t} * g2")));
    }
    let mut axioms = vec![efficiency, null_player, symmetry, linearity];
    axioms.iter_mut().for_each(|a| a.finish(tolerance));
    Ok(AxiomReport {
        method: "shapley/set-function".into(),
        tolerance,
        axioms,
    })
}

/// Worst deviation from one of `sum_T 1 / (n binom(n-1, |T|))` over subsets
/// `T` of the other `n - 1` players, for every `n` up to `max_n`, computed by
/// enumerating the subsets.
pub fn weight_normalization_deviation(max_n: usize) -> f64 {
    let mut worst = 0.0_f64;
    for n in 1..=max_n {
        let mut by_size: BTreeMap<usize, usize> = BTreeMap::new();
        for c in Coalition::all(n - 1) {
            *by_size.entry(c.len()).or_default() += 1;
        }
        let total: f64 = by_size
            .iter()
            .map(|(&t, &count)| count as f64 * crate::shapley::shapley_order_weight(n, t))
            .sum();
        worst = worst.max((total - 1.0).abs());
    }
    worst
}
