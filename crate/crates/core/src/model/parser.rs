//! Recursive-descent parser for the model expression language.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := base ('^' unary)?
//! base  := number | 'x' digits | '(' expr ')' | func '(' expr (',' expr)? ')'
//! func  := exp | log | min | max
//! ```
//!
//! `^` binds tighter than unary minus (`-x1^2` is `-(x1^2)`) and is right
//! associative; the other binary operators associate to the left.

use super::expr::{BinaryOp, Expr, UnaryOp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Log,
    Min,
    Max,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Var(i) => format!("variable x{i}"),
        Tok::Func(f) => format!("function {f:?}").to_lowercase(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::End => "end of input".into(),
    }
}

const OPERAND: &[&str] = &["number", "variable", "'('", "'-'", "exp", "log", "min", "max"];

fn syntax(position: usize, message: impl Into<String>, expected: &[&str]) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number {text:?}"), &["number"]))?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = match word {
                    "exp" => Tok::Func(Func::Exp),
                    "log" => Tok::Func(Func::Log),
                    "min" => Tok::Func(Func::Min),
                    "max" => Tok::Func(Func::Max),
                    w if w.len() > 1 && w.starts_with('x') && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        let idx: usize = w[1..]
                            .parse()
                            .map_err(|_| syntax(start, format!("variable index too large in {w}"), &["variable"]))?;
                        if idx == 0 {
                            return Err(syntax(start, "variable indices start at x1", &["variable"]));
                        }
                        Tok::Var(idx)
                    }
                    w => {
                        return Err(syntax(
                            start,
                            format!("unknown identifier {w:?}"),
                            &["variable", "exp", "log", "min", "max"],
                        ))
                    }
                };
                out.push((tok, start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character {ch:?}"), OPERAND));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    arity: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, label: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!("found {}", describe(self.peek())),
                &[label],
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Var(i) => {
                if i > self.arity {
                    Err(Error::VariableOutOfRange {
                        index: i,
                        arity: self.arity,
                    })
                } else {
                    Ok(Expr::Var(i - 1))
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Func(func) => {
                self.expect(Tok::LParen, "'('")?;
                let a = self.expr()?;
                let second = if *self.peek() == Tok::Comma {
                    self.bump();
                    Some(self.expr()?)
                } else {
                    None
                };
                let close = self.offset();
                self.expect(Tok::RParen, if second.is_some() { "')'" } else { "',' or ')'" })?;
                match (func, second) {
                    (Func::Exp, None) => Ok(Expr::unary(UnaryOp::Exp, a)),
                    (Func::Log, None) => Ok(Expr::unary(UnaryOp::Log, a)),
                    (Func::Min, Some(b)) => Ok(Expr::binary(BinaryOp::Min, a, b)),
                    (Func::Max, Some(b)) => Ok(Expr::binary(BinaryOp::Max, a, b)),
                    (Func::Exp | Func::Log, Some(_)) => Err(syntax(close, "exp and log take one argument", &["')'"])),
                    (Func::Min | Func::Max, None) => Err(syntax(close, "min and max take two arguments", &["','"])),
                }
            }
            other => Err(syntax(at, format!("found {}", describe(&other)), OPERAND)),
        }
    }
}

/// Parses `source` into an expression over variables `x1..x{arity}`.
pub fn parse(source: &str, arity: usize) -> Result<Expr> {
    if arity == 0 {
        return Err(Error::invalid("model", "arity must be at least 1"));
    }
    let toks = lex(source)?;
    if toks.len() == 1 {
        return Err(Error::EmptyExpression);
    }
    let mut p = Parser { toks, pos: 0, arity };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.offset(),
            format!("found {}", describe(p.peek())),
            &["operator", "end of input"],
        ));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: &[f64]) -> f64 {
        parse(src, x.len()).unwrap().eval(x).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2*x1 + 3*x2", &[1.0, 1.0]), 5.0);
        assert_eq!(ev("1 - 2 - 3", &[0.0]), -4.0);
        assert_eq!(ev("8 / 4 / 2", &[0.0]), 1.0);
        assert_eq!(ev("2 ^ 3 ^ 2", &[0.0]), 512.0);
        assert_eq!(ev("-x1^2", &[3.0]), -9.0);
        assert_eq!(ev("(-x1)^2", &[3.0]), 9.0);
        assert_eq!(ev("2^-1", &[0.0]), 0.5);
        assert_eq!(ev("--x1", &[2.0]), 2.0);
        assert_eq!(ev("1 + 2 * 3 ^ 2", &[0.0]), 19.0);
    }

    #[test]
    fn functions_and_numbers() {
        assert_eq!(ev("min(x1, x2) + max(x1, x2)", &[1.0, 4.0]), 5.0);
        assert!((ev("log(exp(x1))", &[0.25]) - 0.25).abs() < 1e-15);
        assert_eq!(ev("1.5e2 + .5 + 2E-1", &[0.0]), 150.7);
    }

    #[test]
    fn projection() {
        assert_eq!(ev("x1", &[0.7, 99.0]), 0.7);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse("x3 + x1", 2),
            Err(Error::VariableOutOfRange { index: 3, arity: 2 })
        ));
        assert!(matches!(parse("   ", 2), Err(Error::EmptyExpression)));
        assert!(matches!(parse("", 2), Err(Error::EmptyExpression)));
        match parse("x1 + * 2", 1) {
            Err(Error::Syntax { position, expected, .. }) => {
                assert_eq!(position, 5);
                assert!(expected.iter().any(|e| e == "number"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(x1", 1), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse("x1 x1", 1), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse("exp(x1, 2)", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("min(x1)", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("y1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x0", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1 # 2", 1), Err(Error::Syntax { position: 3, .. })));
    }

    #[test]
    fn printer_round_trip() {
        for src in ["-x1^2 + min(x2, 3) / (x1 - 0.25)", "2^3^2 - -x2", "exp(-1e-7 * x1)"] {
            let a = parse(src, 2).unwrap();
            let b = parse(&a.to_string(), 2).unwrap();
            assert_eq!(a, b, "{src} -> {a}");
        }
    }
}
