//! Shapley values of a coalition value table.
//!
//! Exact enumeration computes
//! `phi_i = sum_{T not containing i} C(i|T) / (n * binom(n-1, |T|))`.
//! The kernel route solves the weighted least-squares problem
//! `min sum_T k(n, |T|) (g(T) - sum_{j in T} phi_j)^2` subject to
//! `sum_j phi_j = g(U)`, whose minimizer over all coalitions is the same
//! vector; over a sample of coalitions it is the usual KernelSHAP estimate.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::index::sample as sample_indices;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, MAX_FEATURES};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rng::stream_rng;
use crate::valuefn::{build_value_table, CoalitionValueTable, ValueFunctionSpec};

/// Largest `n` for which all `2^n` coalitions are enumerated.
pub const MAX_EXACT_FEATURES: usize = 25;

/// Condition number of the reduced WLS normal matrix treated as rank loss.
pub const WLS_MAX_CONDITION: f64 = 1e12;

/// Per-feature attributions with the reference they are measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionResult {
    /// `f_empty(x)`, the estimate of `E[f(X)]`.
    pub baseline: f64,
    pub phi: Vec<f64>,
    pub method: String,
    #[serde(rename = "coalitions")]
    pub coalitions_evaluated: usize,
    /// Weighted least-squares objective at the solution (kernel route only).
    pub residual: Option<f64>,
}

impl AttributionResult {
    pub fn sum(&self) -> f64 {
        self.phi.iter().sum()
    }
}

/// How coalitions are chosen for an explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalitionMode {
    /// All `2^n` coalitions, exact Shapley formula.
    Exact,
    /// Kernel-sampled coalitions and the constrained WLS solve.
    Wls { budget: usize, seed: u64 },
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// Weight of a coalition of size `t` in the exact Shapley sum over `n` features.
pub fn shapley_order_weight(n: usize, t: usize) -> f64 {
    1.0 / (n as f64 * binomial(n - 1, t))
}

/// Shapley kernel weight `(n-1) / (binom(n,t) t (n-t))` for `0 < t < n`.
pub fn shapley_kernel_weight(n: usize, t: usize) -> Result<f64> {
    if t == 0 || t >= n {
        return Err(Error::invalid(
            "shapley",
            format!("kernel weight of size {t} over {n} features is infinite; use the constraint"),
        ));
    }
    Ok((n - 1) as f64 / (binomial(n, t) * t as f64 * (n - t) as f64))
}

/// Exact Shapley values from a table holding every coalition.
pub fn shapley_exact(table: &CoalitionValueTable) -> Result<AttributionResult> {
    let n = table.n();
    if n > MAX_EXACT_FEATURES {
        return Err(Error::TooManyFeatures {
            n,
            limit: MAX_EXACT_FEATURES,
        });
    }
    let dense: Vec<f64> = Coalition::all(n)
        .map(|c| table.get(c).ok_or_else(|| Error::MissingCoalition(c.to_string())))
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = (0..n).map(|t| shapley_order_weight(n, t)).collect();
    let mut phi = vec![0.0; n];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1usize << i;
        let mut acc = 0.0;
        for mask in 0..dense.len() {
            if mask & bit == 0 {
                acc += weights[mask.count_ones() as usize] * (dense[mask | bit] - dense[mask]);
            }
        }
        *p = acc;
    }
    Ok(AttributionResult {
        baseline: table.baseline(),
        phi,
        method: "exact".into(),
        coalitions_evaluated: dense.len(),
        residual: None,
    })
}

/// Coalitions chosen for a kernel-weighted solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionSample {
    /// Sorted coalitions with their aggregated weights; the empty and full
    /// coalitions carry infinite weight.
    pub coalitions: Vec<(Coalition, f64)>,
    /// Whether the budget covered all `2^n` coalitions.
    pub exhaustive: bool,
}

impl CoalitionSample {
    pub fn coalition_list(&self) -> Vec<Coalition> {
        self.coalitions.iter().map(|(c, _)| *c).collect()
    }
}

/// Calls `f` with every subset of exactly `size` features.
fn for_each_of_size(n: usize, size: usize, mut f: impl FnMut(Coalition)) {
    if size > n {
        return;
    }
    let limit = Coalition::full(n).bits();
    let mut v = Coalition::full(size).bits();
    loop {
        f(Coalition::from_bits(n, v).expect("bits within n"));
        if v == 0 {
            return;
        }
        // Gosper's hack: next integer with the same popcount
        let c = v & v.wrapping_neg();
        let r = v.wrapping_add(c);
        if r == 0 {
            return;
        }
        let next = (((r ^ v) >> 2) / c) | r;
        if next > limit {
            return;
        }
        v = next;
    }
}

/// Kernel-induced coalition sample of `budget` distinct coalitions.
///
/// The empty and full coalitions are always present. Coalition sizes are
/// grouped into complementary pairs `(t, n-t)`; starting from the smallest
/// sizes, a group is enumerated completely when its share of the remaining
/// kernel mass covers all of its coalitions. The rest of the budget is drawn
/// group by group in proportion to kernel mass, each drawn coalition
/// together with its complement; repeated draws add to a coalition's weight.
/// Sampled weights are scaled so they carry the kernel mass of the groups
/// they stand for. An odd budget is rounded down so every coalition keeps
/// its complement. A budget of `2^n` or more enumerates everything.
pub fn sample_coalitions(n: usize, budget: usize, seed: u64) -> Result<CoalitionSample> {
    if n == 0 || n > MAX_FEATURES {
        return Err(Error::invalid(
            "shapley",
            format!("cannot sample coalitions over {n} features"),
        ));
    }
    if budget < 2 {
        return Err(Error::invalid("shapley", "coalition budget must be at least 2"));
    }
    let total = if n >= 63 { usize::MAX } else { 1usize << n };
    if budget >= total {
        let coalitions = Coalition::all(n)
            .map(|c| {
                let w = shapley_kernel_weight(n, c.len()).unwrap_or(f64::INFINITY);
                (c, w)
            })
            .collect();
        return Ok(CoalitionSample {
            coalitions,
            exhaustive: true,
        });
    }

    let mut weights: BTreeMap<Coalition, f64> = BTreeMap::new();
    weights.insert(Coalition::empty(n), f64::INFINITY);
    weights.insert(Coalition::full(n), f64::INFINITY);
    let mut remaining = (budget - 2) & !1;

    // groups of sizes {t, n - t}
    let group_count = |t: usize| binomial(n, t) * if 2 * t == n { 1.0 } else { 2.0 };
    let group_mass = |t: usize| (n - 1) as f64 / (t * (n - t)) as f64 * if 2 * t == n { 1.0 } else { 2.0 };
    let mut open: Vec<usize> = (1..=n / 2).collect();
    while let Some(&t) = open.first() {
        let mass: f64 = open.iter().map(|&s| group_mass(s)).sum();
        let count = group_count(t);
        if remaining as f64 * group_mass(t) / mass + 1e-9 < count {
            break;
        }
        let k = shapley_kernel_weight(n, t)?;
        for size in [t, n - t] {
            for_each_of_size(n, size, |c| {
                weights.insert(c, k);
            });
        }
        remaining -= count as usize;
        open.remove(0);
    }

    if remaining > 0 && !open.is_empty() {
        let masses: Vec<f64> = open.iter().map(|&s| group_mass(s)).collect();
        let open_mass: f64 = masses.iter().sum();
        let mut rng = stream_rng(seed, 0);
        let mut counts: BTreeMap<Coalition, u64> = BTreeMap::new();
        while counts.len() < remaining {
            let mut u = rng.random::<f64>() * open_mass;
            let mut pick = open.len() - 1;
            for (g, m) in masses.iter().enumerate() {
                if u < *m {
                    pick = g;
                    break;
                }
                u -= m;
            }
            let size = if rng.random::<bool>() {
                open[pick]
            } else {
                n - open[pick]
            };
            let mut c = Coalition::empty(n);
            for i in sample_indices(&mut rng, n, size) {
                c = c.with(i);
            }
            *counts.entry(c).or_default() += 1;
            *counts.entry(c.complement()).or_default() += 1;
        }
        let draws: u64 = counts.values().sum();
        for (c, k) in counts {
            weights.insert(c, open_mass * k as f64 / draws as f64);
        }
    }

    Ok(CoalitionSample {
        coalitions: weights.into_iter().collect(),
        exhaustive: false,
    })
}

/// One weighted row of the least-squares system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlsRow {
    pub coalition: Coalition,
    pub weight: f64,
    pub value: f64,
}

/// Weighted rows for `0 < |T| < n`; the empty and full coalitions enter
/// through constraints instead.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsSystem {
    n: usize,
    rows: Vec<WlsRow>,
}

impl WlsSystem {
    /// Validates the rows and merges duplicate coalitions (adding weights).
    pub fn new(n: usize, rows: impl IntoIterator<Item = WlsRow>) -> Result<Self> {
        let mut merged: BTreeMap<Coalition, WlsRow> = BTreeMap::new();
        for row in rows {
            let c = row.coalition;
            if c.n() != n {
                return Err(Error::DimensionMismatch {
                    context: "shapley",
                    expected: n,
                    actual: c.n(),
                });
            }
            if c.is_empty() || c.is_full() {
                return Err(Error::invalid(
                    "shapley",
                    "empty and full coalitions are constraints, not rows",
                ));
            }
            if !(row.weight > 0.0 && row.weight.is_finite()) || !row.value.is_finite() {
                return Err(Error::invalid(
                    "shapley",
                    format!("row {c} has weight {} and value {}", row.weight, row.value),
                ));
            }
            match merged.get_mut(&c) {
                Some(prev) if prev.value != row.value => {
                    return Err(Error::InconsistentDuplicate {
                        coalition: c.to_string(),
                        first: prev.value,
                        second: row.value,
                    })
                }
                Some(prev) => prev.weight += row.weight,
                None => {
                    merged.insert(c, row);
                }
            }
        }
        Ok(Self {
            n,
            rows: merged.into_values().collect(),
        })
    }

    /// Rows for the weighted coalitions of `sample`, valued from `table`.
    pub fn from_table(table: &CoalitionValueTable, sample: &[(Coalition, f64)]) -> Result<Self> {
        let rows = sample
            .iter()
            .filter(|(c, _)| !c.is_empty() && !c.is_full())
            .map(|&(c, weight)| {
                let value = table.get(c).ok_or_else(|| Error::MissingCoalition(c.to_string()))?;
                Ok(WlsRow {
                    coalition: c,
                    weight,
                    value,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(table.n(), rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[WlsRow] {
        &self.rows
    }
}

/// Solves the kernel-weighted least squares with `sum phi = g_full` imposed
/// exactly by eliminating the last coordinate.
pub fn shapley_wls(system: &WlsSystem, g_full: f64) -> Result<AttributionResult> {
    let n = system.n;
    let rows = &system.rows;
    if n == 1 {
        return Ok(AttributionResult {
            baseline: 0.0,
            phi: vec![g_full],
            method: "wls".into(),
            coalitions_evaluated: 2,
            residual: Some(0.0),
        });
    }
    let p = n - 1;
    let last = n - 1;
    let m = rows.len();
    // phi_last = g_full - sum_{j<last} phi_j
    let mut a = DMatrix::zeros(m, p);
    let mut b = DVector::zeros(m);
    for (r, row) in rows.iter().enumerate() {
        let s = row.weight.sqrt();
        let in_last = if row.coalition.contains(last) { 1.0 } else { 0.0 };
        for j in 0..p {
            let in_j = if row.coalition.contains(j) { 1.0 } else { 0.0 };
            a[(r, j)] = s * (in_j - in_last);
        }
        b[r] = s * (row.value - in_last * g_full);
    }

    let gram = a.transpose() * &a;
    let eig = SymmetricEigen::new(gram.clone());
    let (mut lo, mut lo_idx, mut hi) = (f64::INFINITY, 0, 0.0_f64);
    for (i, v) in eig.eigenvalues.iter().enumerate() {
        if *v < lo {
            lo = *v;
            lo_idx = i;
        }
        hi = hi.max(*v);
    }
    if m < p || lo.is_nan() || hi.is_nan() || lo <= hi / WLS_MAX_CONDITION {
        let dir = eig.eigenvectors.column(lo_idx);
        let mut null_direction: Vec<f64> = dir.iter().cloned().collect();
        null_direction.push(-dir.sum());
        return Err(Error::RankDeficient { null_direction });
    }
    let beta = a
        .svd(true, true)
        .solve(&b, 0.0)
        .map_err(|e| Error::invalid("shapley", e.to_string()))?;
    let mut phi: Vec<f64> = beta.iter().cloned().collect();
    phi.push(g_full - beta.sum());

    let residual = rows
        .iter()
        .map(|row| {
            let fit: f64 = row.coalition.indices().map(|j| phi[j]).sum();
            row.weight * (row.value - fit).powi(2)
        })
        .sum();
    Ok(AttributionResult {
        baseline: 0.0,
        phi,
        method: "wls".into(),
        coalitions_evaluated: m + 2,
        residual: Some(residual),
    })
}

/// Shapley values of `model` at `x` under the value function `spec`.
pub fn explain(model: &Model, x: &[f64], spec: &ValueFunctionSpec, mode: CoalitionMode) -> Result<AttributionResult> {
    let n = model.arity();
    match mode {
        CoalitionMode::Exact => {
            if n > MAX_EXACT_FEATURES {
                return Err(Error::TooManyFeatures {
                    n,
                    limit: MAX_EXACT_FEATURES,
                });
            }
            let all: Vec<Coalition> = Coalition::all(n).collect();
            let table = build_value_table(model, x, spec, &all)?;
            let mut out = shapley_exact(&table)?;
            out.method = format!("exact/{}", spec.kind_name());
            Ok(out)
        }
        CoalitionMode::Wls { budget, seed } => {
            let sample = sample_coalitions(n, budget, seed)?;
            let table = build_value_table(model, x, spec, &sample.coalition_list())?;
            let system = WlsSystem::from_table(&table, &sample.coalitions)?;
            let mut out = shapley_wls(&system, table.total())?;
            out.baseline = table.baseline();
            out.coalitions_evaluated = table.len();
            out.method = format!("wls/{}", spec.kind_name());
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Atom, DiscreteDistribution};
    use crate::valuefn::DiscreteMode;
    use proptest::prelude::*;

    fn two_point(mode: DiscreteMode) -> ValueFunctionSpec {
        ValueFunctionSpec::exact(
            DiscreteDistribution::new(vec![
                Atom {
                    point: vec![0.0, 0.0],
                    prob: 0.5,
                },
                Atom {
                    point: vec![1.0, 1.0],
                    prob: 0.5,
                },
            ])
            .unwrap(),
            mode,
        )
    }

    fn random_table(n: usize, seed: u64) -> CoalitionValueTable {
        let mut rng = stream_rng(seed, 99);
        CoalitionValueTable::from_set_function(n, |_| rng.random_range(-2.0..2.0))
    }

    #[test]
    fn kernel_weight_values() {
        assert!((shapley_kernel_weight(3, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((shapley_kernel_weight(3, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for n in 2..20 {
            for t in 1..n {
                assert_eq!(
                    shapley_kernel_weight(n, t).unwrap(),
                    shapley_kernel_weight(n, n - t).unwrap()
                );
            }
        }
        assert!(shapley_kernel_weight(4, 0).is_err());
        assert!(shapley_kernel_weight(4, 4).is_err());
    }

    #[test]
    fn order_weights_sum_to_one() {
        for n in 1..=12 {
            let total: f64 = (0..n).map(|t| binomial(n - 1, t) * shapley_order_weight(n, t)).sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n}: {total}");
        }
    }

    #[test]
    fn two_point_exact() {
        let f = Model::parse("x1", 2).unwrap();
        for x in [[1.0, 1.0], [0.0, 0.0]] {
            let cond = explain(&f, &x, &two_point(DiscreteMode::Conditional), CoalitionMode::Exact).unwrap();
            let marg = explain(&f, &x, &two_point(DiscreteMode::Marginal), CoalitionMode::Exact).unwrap();
            assert!((cond.phi[1] - (x[0] / 2.0 - 0.25)).abs() < 1e-12);
            assert_eq!(marg.phi[1], 0.0);
            assert_eq!(marg.phi[0], x[0] - 0.5);
            assert_eq!(marg.baseline, 0.5);
        }
    }

    #[test]
    fn independent_binary_sum_marginal() {
        let f = Model::parse("x1 + x2", 2).unwrap();
        for (p, q) in [(0.1, 0.7), (0.5, 0.5), (0.9, 0.2)] {
            let d = DiscreteDistribution::product(&[vec![(1.0, 1.0 - p), (2.0, p)], vec![(1.0, 1.0 - q), (2.0, q)]])
                .unwrap();
            let r = explain(
                &f,
                &[2.0, 2.0],
                &ValueFunctionSpec::exact(d, DiscreteMode::Marginal),
                CoalitionMode::Exact,
            )
            .unwrap();
            assert!((r.phi[0] - (1.0 - p)).abs() < 1e-12 && (r.phi[1] - (1.0 - q)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_errors() {
        let mut t = random_table(3, 1);
        assert!(shapley_exact(&t).is_ok());
        // a table with only the endpoints is missing the middle coalitions
        let f = Model::parse("x1 + x2 + x3", 3).unwrap();
        let d = DiscreteDistribution::new(vec![Atom {
            point: vec![0.0; 3],
            prob: 1.0,
        }])
        .unwrap();
        t = build_value_table(&f, &[1.0; 3], &ValueFunctionSpec::exact(d, DiscreteMode::Marginal), &[]).unwrap();
        assert!(matches!(shapley_exact(&t), Err(Error::MissingCoalition(_))));
        let f = Model::parse("x1", 26).unwrap();
        let d = DiscreteDistribution::new(vec![Atom {
            point: vec![0.0; 26],
            prob: 1.0,
        }])
        .unwrap();
        assert!(matches!(
            explain(
                &f,
                &[0.0; 26],
                &ValueFunctionSpec::exact(d, DiscreteMode::Marginal),
                CoalitionMode::Exact
            ),
            Err(Error::TooManyFeatures { .. })
        ));
    }

    #[test]
    fn wls_matches_exact_on_full_enumeration() {
        for n in 2..=8 {
            for seed in 0..5 {
                let table = random_table(n, seed * 31 + n as u64);
                let exact = shapley_exact(&table).unwrap();
                let sample = sample_coalitions(n, 1 << n, 0).unwrap();
                assert!(sample.exhaustive);
                let sys = WlsSystem::from_table(&table, &sample.coalitions).unwrap();
                let wls = shapley_wls(&sys, table.total()).unwrap();
                for (a, b) in wls.phi.iter().zip(&exact.phi) {
                    assert!((a - b).abs() < 1e-8, "n={n}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn wls_additive_is_exact() {
        let coef = [0.5, -1.25, 2.0, 0.0, 3.5];
        let table = CoalitionValueTable::from_set_function(5, |c| c.indices().map(|j| coef[j]).sum());
        let sample = sample_coalitions(5, 12, 3).unwrap();
        assert!(!sample.exhaustive);
        let sys = WlsSystem::from_table(&table, &sample.coalitions).unwrap();
        let r = shapley_wls(&sys, table.total()).unwrap();
        for (a, b) in r.phi.iter().zip(&coef) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(r.residual.unwrap() < 1e-20);
    }

    #[test]
    fn wls_two_point_marginal() {
        let f = Model::parse("x1", 2).unwrap();
        let r = explain(
            &f,
            &[1.0, 1.0],
            &two_point(DiscreteMode::Marginal),
            CoalitionMode::Wls { budget: 4, seed: 0 },
        )
        .unwrap();
        assert!((r.phi[0] - 0.5).abs() < 1e-12 && r.phi[1].abs() < 1e-12);
        assert_eq!(r.method, "wls/exact-discrete-marginal");
    }

    #[test]
    fn wls_errors() {
        let c = |bits| Coalition::from_bits(3, bits).unwrap();
        let row = |bits, value| WlsRow {
            coalition: c(bits),
            weight: 1.0,
            value,
        };
        assert!(matches!(
            WlsSystem::new(3, [row(0b001, 1.0), row(0b001, 2.0)]),
            Err(Error::InconsistentDuplicate { .. })
        ));
        let merged = WlsSystem::new(3, [row(0b001, 1.0), row(0b001, 1.0)]).unwrap();
        assert_eq!(merged.rows().len(), 1);
        assert_eq!(merged.rows()[0].weight, 2.0);
        assert!(WlsSystem::new(3, [row(0b111, 1.0)]).is_err());
        // one row cannot pin two free coordinates
        let sys = WlsSystem::new(3, [row(0b001, 1.0)]).unwrap();
        match shapley_wls(&sys, 1.0) {
            Err(Error::RankDeficient { null_direction }) => {
                assert_eq!(null_direction.len(), 3);
                assert!(null_direction.iter().sum::<f64>().abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        // rows {1} and {1}'s complement {2,3} leave features 2 and 3 tied
        let sys = WlsSystem::new(3, [row(0b001, 1.0), row(0b110, 0.0)]).unwrap();
        assert!(matches!(shapley_wls(&sys, 1.0), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn sampling_examples() {
        let s = sample_coalitions(10, 512, 42).unwrap();
        assert_eq!(s, sample_coalitions(10, 512, 42).unwrap());
        assert_eq!(s.coalitions.len(), 512);
        assert!(!s.exhaustive);
        let s = sample_coalitions(3, 8, 0).unwrap();
        assert!(s.exhaustive);
        assert_eq!(s.coalitions.len(), 8);
        assert!(sample_coalitions(3, 1, 0).is_err());
        // odd budgets round down to keep complements paired
        assert_eq!(sample_coalitions(6, 11, 0).unwrap().coalitions.len(), 10);
    }

    #[test]
    fn gosper_enumeration_counts() {
        for n in 1..=12 {
            for k in 0..=n {
                let mut seen = 0;
                for_each_of_size(n, k, |c| {
                    assert_eq!(c.len(), k);
                    seen += 1;
                });
                assert_eq!(seen as f64, binomial(n, k), "n={n} k={k}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn samples_are_paired_and_contain_endpoints(n in 2usize..=14, budget in 2usize..600, seed in any::<u64>()) {
            let s = sample_coalitions(n, budget, seed).unwrap();
            let set: std::collections::BTreeSet<Coalition> = s.coalitions.iter().map(|(c, _)| *c).collect();
            prop_assert!(set.contains(&Coalition::empty(n)));
            prop_assert!(set.contains(&Coalition::full(n)));
            for c in &set {
                prop_assert!(set.contains(&c.complement()));
            }
            let cap = 1usize << n;
            prop_assert_eq!(set.len(), if budget >= cap { cap } else { budget & !1 });
            for (c, w) in &s.coalitions {
                if c.is_empty() || c.is_full() {
                    prop_assert!(w.is_infinite());
                } else {
                    prop_assert!(*w > 0.0 && w.is_finite());
                }
            }
        }

        #[test]
        fn exact_is_efficient_and_linear(n in 1usize..=8, s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let g1 = random_table(n, s1);
            let g2 = random_table(n, s2);
            let combo = CoalitionValueTable::from_set_function(n, |c| a * g1.get(c).unwrap() + b * g2.get(c).unwrap());
            let p1 = shapley_exact(&g1).unwrap();
            let p2 = shapley_exact(&g2).unwrap();
            let pc = shapley_exact(&combo).unwrap();
            prop_assert!((p1.sum() - g1.total()).abs() < 1e-10);
            for i in 0..n {
                prop_assert!((pc.phi[i] - (a * p1.phi[i] + b * p2.phi[i])).abs() < 1e-10);
            }
        }
    }
}
