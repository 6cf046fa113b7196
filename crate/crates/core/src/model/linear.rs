use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::expr::{BinaryOp, Expr};
use crate::data::SampleMatrix;
use crate::error::{Error, Result};
use crate::linalg;

/// Condition number above which the OLS normal equations are rejected.
pub const OLS_MAX_CONDITION: f64 = 1e12;

/// `f(x) = intercept + sum_i coefficients[i] * x[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn new(intercept: f64, coefficients: Vec<f64>) -> Self {
        Self {
            intercept,
            coefficients,
        }
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Error::check_len("model", self.arity(), x.len())?;
        let v = self
            .coefficients
            .iter()
            .zip(x)
            .fold(self.intercept, |acc, (a, xi)| acc + a * xi);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: "model",
                detail: format!("linear model output {v}"),
            })
        }
    }

    pub fn to_expr(&self) -> Expr {
        self.coefficients
            .iter()
            .enumerate()
            .fold(Expr::Const(self.intercept), |acc, (i, a)| {
                Expr::binary(
                    BinaryOp::Add,
                    acc,
                    Expr::binary(BinaryOp::Mul, Expr::Const(*a), Expr::Var(i)),
                )
            })
    }

    /// Exact attribution of a linear model against the feature means:
    /// `coefficients[j] * (x[j] - means[j])`.
    pub fn analytic_attribution(&self, x: &[f64], means: &[f64]) -> Result<Vec<f64>> {
        Error::check_len("model", self.arity(), x.len())?;
        Error::check_len("model", self.arity(), means.len())?;
        Ok(self
            .coefficients
            .iter()
            .zip(x.iter().zip(means))
            .map(|(a, (xi, mi))| a * (xi - mi))
            .collect())
    }
}

/// Ordinary least squares of column `target` on every other column of `data`.
///
/// Solved through the normal equations with a Cholesky factorization. The
/// returned coefficients follow the order of the remaining columns.
pub fn fit_linear_ols(data: &SampleMatrix, target: usize) -> Result<LinearModel> {
    let cols = data.ncols();
    if target >= cols {
        return Err(Error::invalid(
            "model",
            format!("target column {target} out of range for {cols} columns"),
        ));
    }
    let predictors: Vec<usize> = (0..cols).filter(|&c| c != target).collect();
    let p = predictors.len() + 1;
    if data.nrows() < p {
        return Err(Error::TooFewRows {
            context: "model",
            rows: data.nrows(),
            needed: p,
        });
    }
    let design = DMatrix::from_fn(data.nrows(), p, |r, c| {
        if c == 0 {
            1.0
        } else {
            data.get(r, predictors[c - 1])
        }
    });
    let y = DVector::from_fn(data.nrows(), |r, _| data.get(r, target));
    let gram = design.transpose() * &design;
    let condition = linalg::condition_estimate(&gram);
    if condition.is_nan() || condition > OLS_MAX_CONDITION {
        return Err(Error::Singular {
            context: "model",
            condition,
        });
    }
    let rhs = design.transpose() * y;
    let chol = gram.cholesky().ok_or(Error::Singular {
        context: "model",
        condition,
    })?;
    let beta = chol.solve(&rhs);
    Ok(LinearModel::new(beta[0], beta.iter().skip(1).cloned().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<f64>>) -> SampleMatrix {
        SampleMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn ols_recovers_noiseless_plane() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let x1 = i as f64 * 0.7 - 2.0;
                let x2 = ((i * i) % 7) as f64 - 1.5;
                vec![x1, x2, 1.0 + 2.0 * x1 - x2]
            })
            .collect();
        let m = fit_linear_ols(&matrix(rows), 2).unwrap();
        for (got, want) in [m.intercept, m.coefficients[0], m.coefficients[1]]
            .iter()
            .zip([1.0, 2.0, -1.0])
        {
            assert!((got - want).abs() <= 1e-10 * want.abs(), "{got} vs {want}");
        }
    }

    #[test]
    fn ols_constant_target() {
        let rows = (0..6).map(|i| vec![i as f64, (i % 3) as f64, 5.0]).collect();
        let m = fit_linear_ols(&matrix(rows), 2).unwrap();
        assert!((m.intercept - 5.0).abs() < 1e-10);
        assert!(m.coefficients.iter().all(|c| c.abs() < 1e-10));
    }

    #[test]
    fn ols_target_in_middle_column() {
        let rows = (0..8).map(|i| {
            let a = i as f64;
            let b = (i as f64).sin();
            vec![a, 3.0 - a + 4.0 * b, b]
        });
        let m = fit_linear_ols(&matrix(rows.collect()), 1).unwrap();
        assert!((m.intercept - 3.0).abs() < 1e-9);
        assert!((m.coefficients[0] + 1.0).abs() < 1e-9);
        assert!((m.coefficients[1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn ols_rejects_collinear_predictors() {
        let rows = (0..10)
            .map(|i| vec![i as f64, i as f64, 2.0 * i as f64 + 1.0])
            .collect();
        assert!(matches!(fit_linear_ols(&matrix(rows), 2), Err(Error::Singular { .. })));
    }

    #[test]
    fn ols_too_few_rows() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 0.0]];
        assert!(matches!(
            fit_linear_ols(&matrix(rows), 2),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn analytic_attribution_examples() {
        let m = LinearModel::new(0.0, vec![2.0, 3.0]);
        assert_eq!(
            m.analytic_attribution(&[1.0, 1.0], &[0.0, 0.0]).unwrap(),
            vec![2.0, 3.0]
        );
        assert_eq!(
            m.analytic_attribution(&[0.5, -1.0], &[0.5, -1.0]).unwrap(),
            vec![0.0, 0.0]
        );
        let (p, q) = (0.3, 0.8);
        let ones = LinearModel::new(0.0, vec![1.0, 1.0]);
        let a = ones.analytic_attribution(&[2.0, 2.0], &[1.0 + p, 1.0 + q]).unwrap();
        assert!((a[0] - (1.0 - p)).abs() < 1e-15 && (a[1] - (1.0 - q)).abs() < 1e-15);
        assert!(matches!(
            m.analytic_attribution(&[1.0], &[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn to_expr_agrees() {
        let m = LinearModel::new(-0.5, vec![1.25, 0.0, -3.0]);
        let x = [0.1, 7.0, -2.0];
        assert_eq!(m.evaluate(&x).unwrap(), m.to_expr().eval(&x).unwrap());
    }
}
