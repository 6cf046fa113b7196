//! Frozen reference values from closed-form derivations.

use approx::assert_abs_diff_eq;
use attrib_core::data::{Atom, DiscreteDistribution, GaussianSpec};
use attrib_core::intgrad::{integrated_gradients, path_attribution, PathSpec};
use attrib_core::model::fit_linear_ols;
use attrib_core::shapley::explain;
use attrib_core::valuefn::{gaussian_condition, DiscreteMode};
use attrib_core::{Coalition, CoalitionMode, Model, SampleMatrix, ValueFunctionSpec};
use nalgebra::DMatrix;

fn two_point() -> DiscreteDistribution {
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
    .unwrap()
}

fn phi(model: &str, n: usize, x: &[f64], spec: &ValueFunctionSpec) -> Vec<f64> {
    explain(&Model::parse(model, n).unwrap(), x, spec, CoalitionMode::Exact)
        .unwrap()
        .phi
}

#[test]
fn ignored_feature_conditional_vs_marginal() {
    let cond = ValueFunctionSpec::exact(two_point(), DiscreteMode::Conditional);
    let marg = ValueFunctionSpec::exact(two_point(), DiscreteMode::Marginal);
    for x1 in [0.0, 1.0] {
        let c = phi("x1", 2, &[x1, x1], &cond);
        assert_abs_diff_eq!(c[1], x1 / 2.0 - 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(c[0] + c[1], x1 - 0.5, epsilon = 1e-12);
        let m = phi("x1", 2, &[x1, x1], &marg);
        assert_eq!(m[1], 0.0);
        assert_abs_diff_eq!(m[0], x1 - 0.5, epsilon = 1e-12);
    }
}

#[test]
fn independent_binary_sum() {
    for (p, q) in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)] {
        let d =
            DiscreteDistribution::product(&[vec![(1.0, 1.0 - p), (2.0, p)], vec![(1.0, 1.0 - q), (2.0, q)]]).unwrap();
        for mode in [DiscreteMode::Marginal, DiscreteMode::Conditional] {
            let r = phi("x1 + x2", 2, &[2.0, 2.0], &ValueFunctionSpec::exact(d.clone(), mode));
            assert_abs_diff_eq!(r[0], 1.0 - p, epsilon = 1e-12);
            assert_abs_diff_eq!(r[1], 1.0 - q, epsilon = 1e-12);
        }
    }
}

#[test]
fn product_of_fair_bits() {
    // g(empty) = 1/4, g({i}) = 1/2, g(U) = 1: phi_i = (1/4 + 1/2) / 2
    let d = DiscreteDistribution::product(&[vec![(0.0, 0.5), (1.0, 0.5)], vec![(0.0, 0.5), (1.0, 0.5)]]).unwrap();
    let r = phi(
        "x1 * x2",
        2,
        &[1.0, 1.0],
        &ValueFunctionSpec::exact(d, DiscreteMode::Marginal),
    );
    assert_abs_diff_eq!(r[0], 0.375, epsilon = 1e-15);
    assert_abs_diff_eq!(r[1], 0.375, epsilon = 1e-15);
}

#[test]
fn bivariate_gaussian_conditioning() {
    // X2 | X1 = a ~ N(mu2 + rho s2/s1 (a - mu1), s2^2 (1 - rho^2))
    let (mu1, mu2, s1, s2, rho) = (1.0, -2.0, 2.0, 0.5, 0.6);
    let cov = DMatrix::from_row_slice(2, 2, &[s1 * s1, rho * s1 * s2, rho * s1 * s2, s2 * s2]);
    let g = GaussianSpec::new(vec![mu1, mu2], cov).unwrap();
    let t = Coalition::from_indices(2, &[0]).unwrap();
    let c = gaussian_condition(&g, t, &[3.0]).unwrap();
    assert_abs_diff_eq!(c.mean()[0], mu2 + rho * s2 / s1 * (3.0 - mu1), epsilon = 1e-12);
    assert_abs_diff_eq!(c.cov()[(0, 0)], s2 * s2 * (1.0 - rho * rho), epsilon = 1e-12);
}

#[test]
fn ols_recovers_exact_relation() {
    let rows: Vec<Vec<f64>> = (0..30)
        .map(|i| {
            let a = (i as f64 * 0.37).sin();
            let b = (i as f64 * 1.3).cos() * 2.0;
            vec![a, b, 3.0 + 2.0 * a - b]
        })
        .collect();
    let m = fit_linear_ols(&SampleMatrix::from_rows(rows).unwrap(), 2).unwrap();
    assert_abs_diff_eq!(m.intercept, 3.0, epsilon = 1e-10);
    assert_abs_diff_eq!(m.coefficients[0], 2.0, epsilon = 1e-10);
    assert_abs_diff_eq!(m.coefficients[1], -1.0, epsilon = 1e-10);
}

#[test]
fn ig_closed_forms() {
    let f = Model::parse("2*x1 + 3*x2", 2).unwrap();
    let a = integrated_gradients(&f, &[1.0, 1.0], &[0.0, 0.0], 1).unwrap();
    assert_abs_diff_eq!(a[0], 2.0, epsilon = 1e-8);
    assert_abs_diff_eq!(a[1], 3.0, epsilon = 1e-8);

    let sq = Model::parse("x1^2", 1).unwrap();
    assert_abs_diff_eq!(
        integrated_gradients(&sq, &[1.0], &[0.0], 1000).unwrap()[0],
        1.0,
        epsilon = 1e-4
    );

    // straight line through a bilinear form splits evenly
    let bil = Model::parse("x1 * x2", 2).unwrap();
    let a = integrated_gradients(&bil, &[1.0, 1.0], &[0.0, 0.0], 300).unwrap();
    assert_abs_diff_eq!(a[0], 0.5, epsilon = 1e-6);
    assert_abs_diff_eq!(a[1], 0.5, epsilon = 1e-6);

    let e = Model::parse("exp(x1)", 1).unwrap();
    let a = integrated_gradients(&e, &[1.0], &[0.0], 1000).unwrap();
    assert_abs_diff_eq!(a[0], std::f64::consts::E - 1.0, epsilon = 1e-5);
}

#[test]
fn staircase_orders() {
    let f = Model::parse("x1 * x2", 2).unwrap();
    let p = PathSpec::piecewise(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]], 4).unwrap();
    let a = path_attribution(&f, &p).unwrap();
    assert_abs_diff_eq!(a[0], 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!(a[1], 1.0, epsilon = 1e-9);
    let p = PathSpec::piecewise(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], 4).unwrap();
    let a = path_attribution(&f, &p).unwrap();
    assert_abs_diff_eq!(a[0], 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(a[1], 0.0, epsilon = 1e-9);
}
