//! Black-box target functions.

mod expr;
mod linear;
mod parser;

pub use expr::{BinaryOp, Expr, UnaryOp};
pub use linear::{fit_linear_ols, LinearModel, OLS_MAX_CONDITION};
pub use parser::parse;

use crate::error::{Error, Result};

/// Default central-difference step, scaled by `max(1, |x_i|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A pure map from `arity` reals to one real.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Expr { arity: usize, expr: Expr },
    Linear(LinearModel),
}

impl Model {
    pub fn parse(source: &str, arity: usize) -> Result<Self> {
        Ok(Model::Expr {
            arity,
            expr: parse(source, arity)?,
        })
    }

    /// Wraps an expression, checking that its variables fit in `arity`.
    pub fn from_expr(expr: Expr, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("model", "arity must be at least 1"));
        }
        let needed = expr.min_arity();
        if needed > arity {
            return Err(Error::VariableOutOfRange { index: needed, arity });
        }
        Ok(Model::Expr { arity, expr })
    }

    pub fn arity(&self) -> usize {
        match self {
            Model::Expr { arity, .. } => *arity,
            Model::Linear(m) => m.arity(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Error::check_len("model", self.arity(), x.len())?;
        match self {
            Model::Expr { expr, .. } => expr.eval(x),
            Model::Linear(m) => m.evaluate(x),
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Model::Expr { expr, .. } => expr.clone(),
            Model::Linear(m) => m.to_expr(),
        }
    }

    /// Whether the model can depend on feature `index` at all.
    ///
    /// Expressions answer syntactically; linear models by a nonzero coefficient.
    pub fn mentions(&self, index: usize) -> bool {
        match self {
            Model::Expr { expr, .. } => expr.mentions(index),
            Model::Linear(m) => m.coefficients.get(index).is_some_and(|c| *c != 0.0),
        }
    }

    /// `a * f + b * g` as a new model of the same arity.
    pub fn linear_combination(a: f64, f: &Model, b: f64, g: &Model) -> Result<Model> {
        Error::check_len("model", f.arity(), g.arity())?;
        if let (Model::Linear(lf), Model::Linear(lg)) = (f, g) {
            return Ok(Model::Linear(LinearModel::new(
                a * lf.intercept + b * lg.intercept,
                lf.coefficients
                    .iter()
                    .zip(&lg.coefficients)
                    .map(|(x, y)| a * x + b * y)
                    .collect(),
            )));
        }
        let expr = Expr::binary(
            BinaryOp::Add,
            Expr::binary(BinaryOp::Mul, Expr::Const(a), f.to_expr()),
            Expr::binary(BinaryOp::Mul, Expr::Const(b), g.to_expr()),
        );
        Model::from_expr(expr, f.arity())
    }

    /// Central finite-difference gradient with per-coordinate step
    /// `step * max(1, |x_i|)`.
    pub fn gradient_fd(&self, x: &[f64], step: f64) -> Result<Vec<f64>> {
        Error::check_len("model", self.arity(), x.len())?;
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::invalid(
                "model",
                format!("finite-difference step {step} must be positive"),
            ));
        }
        if let Model::Linear(m) = self {
            m.evaluate(x)?;
        }
        let mut probe = x.to_vec();
        let mut grad = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let h = step * x[i].abs().max(1.0);
            let (hi, lo) = (x[i] + h, x[i] - h);
            probe[i] = hi;
            let up = self.evaluate(&probe)?;
            probe[i] = lo;
            let down = self.evaluate(&probe)?;
            probe[i] = x[i];
            // divide by the representable spacing, not 2h
            let d = (up - down) / (hi - lo);
            if !d.is_finite() {
                return Err(Error::NonFinite {
                    context: "model",
                    detail: format!("gradient component {i} at {x:?}"),
                });
            }
            grad.push(d);
        }
        Ok(grad)
    }
}

impl From<LinearModel> for Model {
    fn from(m: LinearModel) -> Self {
        Model::Linear(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let m = Model::Linear(LinearModel::new(0.0, vec![1.0, 0.0]));
        assert_eq!(m.evaluate(&[1.0, 1.0]).unwrap(), 1.0);
        let s = Model::parse("x1 + x2", 2).unwrap();
        assert_eq!(s.evaluate(&[2.0, 2.0]).unwrap(), 4.0);
        assert!(matches!(
            s.evaluate(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 1,
                ..
            })
        ));
        assert!(matches!(
            m.evaluate(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_domain_errors() {
        let d = Model::parse("1 / (x1 - 1)", 1).unwrap();
        assert!(matches!(d.evaluate(&[1.0]), Err(Error::NonFinite { .. })));
        let l = Model::parse("log(x1)", 1).unwrap();
        assert!(matches!(l.evaluate(&[0.0]), Err(Error::NonFinite { .. })));
        assert!(matches!(l.evaluate(&[-2.0]), Err(Error::NonFinite { .. })));
        let p = Model::parse("x1 ^ 0.5", 1).unwrap();
        assert!(matches!(p.evaluate(&[-4.0]), Err(Error::NonFinite { .. })));
        let e = Model::parse("exp(x1)", 1).unwrap();
        assert!(matches!(e.evaluate(&[1e4]), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn gradient_examples() {
        let lin = Model::parse("2*x1 + 3*x2", 2).unwrap();
        let g = lin.gradient_fd(&[0.3, -7.0], 1e-5).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-8 && (g[1] - 3.0).abs() < 1e-8);

        // d/dx x^2 = 2x
        let sq = Model::parse("x1^2", 1).unwrap();
        let g = sq.gradient_fd(&[3.0], 1e-4).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-6);

        let c = Model::parse("4.5", 3).unwrap();
        assert_eq!(c.gradient_fd(&[1.0, 2.0, 3.0], 1e-5).unwrap(), vec![0.0; 3]);

        assert!(matches!(
            lin.gradient_fd(&[0.0, 0.0], 0.0),
            Err(Error::InvalidArgument { .. })
        ));
        let edge = Model::parse("log(x1)", 1).unwrap();
        assert!(matches!(edge.gradient_fd(&[0.0], 1e-5), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn combination_and_mentions() {
        let f = Model::parse("x1 * x2", 3).unwrap();
        let g = Model::parse("x3", 3).unwrap();
        let h = Model::linear_combination(2.0, &f, -1.0, &g).unwrap();
        assert_eq!(h.evaluate(&[2.0, 3.0, 5.0]).unwrap(), 7.0);
        assert!(f.mentions(0) && !f.mentions(2));
        let l = Model::Linear(LinearModel::new(1.0, vec![0.0, 2.0]));
        assert!(!l.mentions(0) && l.mentions(1));
        let ll = Model::linear_combination(3.0, &l, 1.0, &l).unwrap();
        assert_eq!(ll, Model::Linear(LinearModel::new(4.0, vec![0.0, 8.0])));
    }
}
