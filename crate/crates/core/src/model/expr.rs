use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

/// Arithmetic expression tree. Variables are zero-based internally and
/// printed as `x1..xn`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn var(index: usize) -> Self {
        Expr::Var(index)
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Self {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Unary(op, a) => {
                let a = a.eval(x)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Log => {
                        if a <= 0.0 {
                            return Err(non_finite(format!("log of non-positive value {a}")));
                        }
                        a.ln()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let a = a.eval(x)?;
                let b = b.eval(x)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(non_finite(format!("division of {a} by zero")));
                        }
                        a / b
                    }
                    BinaryOp::Pow => a.powf(b),
                    BinaryOp::Min => a.min(b),
                    BinaryOp::Max => a.max(b),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(non_finite(format!("intermediate value {v} in {self}")))
        }
    }

    /// Largest variable index plus one (0 for constant expressions).
    pub fn min_arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Unary(_, a) => a.min_arity(),
            Expr::Binary(_, a, b) => a.min_arity().max(b.min_arity()),
        }
    }

    /// Whether variable `index` occurs anywhere in the tree.
    pub fn mentions(&self, index: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(i) => *i == index,
            Expr::Unary(_, a) => a.mentions(index),
            Expr::Binary(_, a, b) => a.mentions(index) || b.mentions(index),
        }
    }

    /// Copy of the tree with variables `i` and `j` exchanged.
    pub fn swap_vars(&self, i: usize, j: usize) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(k) if *k == i => Expr::Var(j),
            Expr::Var(k) if *k == j => Expr::Var(i),
            Expr::Var(k) => Expr::Var(*k),
            Expr::Unary(op, a) => Expr::unary(*op, a.swap_vars(i, j)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.swap_vars(i, j), b.swap_vars(i, j)),
        }
    }
}

fn non_finite(detail: String) -> Error {
    Error::NonFinite {
        context: "model",
        detail,
    }
}

/// Fully parenthesized form that parses back to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(UnaryOp::Exp, a) => write!(f, "exp({a})"),
            Expr::Unary(UnaryOp::Log, a) => write!(f, "log({a})"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                    BinaryOp::Min => return write!(f, "min({a}, {b})"),
                    BinaryOp::Max => return write!(f, "max({a}, {b})"),
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}
