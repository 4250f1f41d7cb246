//! Scalar component expressions.
//!
//! Every metric, affinor and embedding component is an [`Expression`]: a
//! small arithmetic AST over ambient coordinates `x1..xm` or parameters
//! `u1..un`. Expressions evaluate to plain values or to second-order
//! [`Jet2`]s, which is how all downstream derivatives are obtained.

mod jet;
mod parser;

use std::fmt;

use thiserror::Error;

pub use jet::{Jet2, JetOrder};
pub use parser::ParseError;

/// Which coordinate family a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// `x1..xm`, coordinates of the ambient chart.
    Ambient,
    /// `u1..un`, parameters of a submanifold.
    Param,
}

impl VarKind {
    pub fn prefix(self) -> char {
        match self {
            VarKind::Ambient => 'x',
            VarKind::Param => 'u',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn all() -> &'static [Func] {
        &Self::ALL
    }
}

/// Abstract syntax tree. Variable indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(VarKind, usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
    #[error("expected a point with {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
}

fn domain(e: &Expr, reason: impl Into<String>) -> EvalError {
    EvalError::Domain {
        subexpr: e.to_string(),
        reason: reason.into(),
    }
}

impl Expr {
    /// Value of a variable-free subtree, if it is one.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Var(..) => None,
            Expr::Neg(a) => a.constant_value().map(|v| -v),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.constant_value()?, b.constant_value()?);
                Some(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                })
            }
            Expr::Call(f, a) => {
                let a = a.constant_value()?;
                Some(apply_func(*f, a))
            }
        }
    }

    fn integer_exponent(&self) -> Option<i64> {
        let v = self.constant_value()?;
        (v.is_finite() && v.fract() == 0.0 && v.abs() <= 1024.0).then_some(v as i64)
    }

    fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(_, i) => point[*i],
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval(point)?;
                match op {
                    BinOp::Add => x + b.eval(point)?,
                    BinOp::Sub => x - b.eval(point)?,
                    BinOp::Mul => x * b.eval(point)?,
                    BinOp::Div => {
                        let y = b.eval(point)?;
                        if y == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => match b.integer_exponent() {
                        Some(n) => {
                            if n < 0 && x == 0.0 {
                                return Err(domain(self, "zero raised to a negative power"));
                            }
                            powi_by_multiplication(x, n)
                        }
                        None => {
                            if x <= 0.0 {
                                return Err(domain(self, "non-integer power of a non-positive base"));
                            }
                            x.powf(b.eval(point)?)
                        }
                    },
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(point)?;
                check_func_domain(*f, x, false).map_err(|r| domain(self, r))?;
                apply_func(*f, x)
            }
        };
        if !v.is_finite() {
            return Err(domain(self, "non-finite result"));
        }
        Ok(v)
    }

    fn eval_jet(&self, point: &[f64], order: JetOrder) -> Result<Jet2, EvalError> {
        let dim = point.len();
        let j = match self {
            Expr::Num(v) => Jet2::constant(*v, dim, order),
            Expr::Var(_, i) => Jet2::variable(point[*i], *i, dim, order),
            Expr::Neg(a) => a.eval_jet(point, order)?.neg(),
            Expr::Binary(op, a, b) => {
                let x = a.eval_jet(point, order)?;
                match op {
                    BinOp::Add => x.add(&b.eval_jet(point, order)?),
                    BinOp::Sub => x.sub(&b.eval_jet(point, order)?),
                    BinOp::Mul => x.mul(&b.eval_jet(point, order)?),
                    BinOp::Div => {
                        let y = b.eval_jet(point, order)?;
                        if y.value == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        x.div(&y)
                    }
                    BinOp::Pow => match b.integer_exponent() {
                        Some(n) => {
                            if n < 0 && x.value == 0.0 {
                                return Err(domain(self, "zero raised to a negative power"));
                            }
                            x.powi(n)
                        }
                        None => {
                            if x.value <= 0.0 {
                                return Err(domain(self, "non-integer power of a non-positive base"));
                            }
                            let y = b.eval_jet(point, order)?;
                            y.mul(&x.ln()).exp()
                        }
                    },
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_jet(point, order)?;
                check_func_domain(*f, x.value, true).map_err(|r| domain(self, r))?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                }
            }
        };
        if !j.is_finite() {
            return Err(domain(self, "non-finite result"));
        }
        Ok(j)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn powi_by_multiplication(x: f64, n: i64) -> f64 {
    let mut result = 1.0;
    let mut base = x;
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result *= base;
        }
        e >>= 1;
        if e > 0 {
            base *= base;
        }
    }
    if n < 0 {
        1.0 / result
    } else {
        result
    }
}

fn apply_func(f: Func, x: f64) -> f64 {
    match f {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Log => x.ln(),
        Func::Sqrt => x.sqrt(),
        Func::Sinh => x.sinh(),
        Func::Cosh => x.cosh(),
    }
}

/// `sqrt` is differentiable only on the open half-line, so jets demand `x > 0`.
fn check_func_domain(f: Func, x: f64, differentiating: bool) -> Result<(), &'static str> {
    match f {
        Func::Log if x <= 0.0 => Err("log of a non-positive value"),
        Func::Sqrt if x < 0.0 => Err("sqrt of a negative value"),
        Func::Sqrt if differentiating && x == 0.0 => Err("sqrt is not differentiable at 0"),
        _ => Ok(()),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => {
                if v.is_sign_negative() {
                    write!(f, "-{:?}", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Var(kind, i) => write!(f, "{}{}", kind.prefix(), i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                child(f, a, a.precedence() < 3)
            }
            Expr::Binary(BinOp::Pow, a, b) => {
                child(f, a, a.precedence() <= 4)?;
                write!(f, "^")?;
                child(f, b, b.precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => unreachable!(),
                };
                child(f, a, a.precedence() < p)?;
                write!(f, " {sym} ")?;
                child(f, b, b.precedence() <= p)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A parsed component expression together with its declared arity.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Expr,
    arity: usize,
}

impl Expression {
    /// Parses `source`, accepting both `x` and `u` variables up to `arity`.
    pub fn parse(source: &str, arity: usize) -> Result<Self, ParseError> {
        Self::parse_with(source, arity, &[VarKind::Ambient, VarKind::Param])
    }

    /// Parses `source`, accepting only variables of `kind`.
    pub fn parse_in(source: &str, arity: usize, kind: VarKind) -> Result<Self, ParseError> {
        Self::parse_with(source, arity, &[kind])
    }

    fn parse_with(source: &str, arity: usize, allowed: &[VarKind]) -> Result<Self, ParseError> {
        let root = parser::Parser::new(source, arity, allowed)?.parse_complete()?;
        Ok(Self { root, arity })
    }

    pub fn constant(value: f64, arity: usize) -> Self {
        Self {
            root: Expr::Num(value),
            arity,
        }
    }

    /// Wraps an already built tree. Panics if a variable exceeds `arity`.
    pub fn from_ast(root: Expr, arity: usize) -> Self {
        fn max_var(e: &Expr) -> usize {
            match e {
                Expr::Num(_) => 0,
                Expr::Var(_, i) => i + 1,
                Expr::Neg(a) | Expr::Call(_, a) => max_var(a),
                Expr::Binary(_, a, b) => max_var(a).max(max_var(b)),
            }
        }
        assert!(max_var(&root) <= arity, "expression uses a variable beyond arity {arity}");
        Self { root, arity }
    }

    pub fn ast(&self) -> &Expr {
        &self.root
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.root.constant_value()
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.check_arity(point)?;
        self.root.eval(point)
    }

    pub fn evaluate_jet(&self, point: &[f64], order: JetOrder) -> Result<Jet2, EvalError> {
        self.check_arity(point)?;
        self.root.eval_jet(point, order)
    }

    fn check_arity(&self, point: &[f64]) -> Result<(), EvalError> {
        if point.len() != self.arity {
            return Err(EvalError::Arity {
                expected: self.arity,
                got: point.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(i: usize) -> Box<Expr> {
        Box::new(Expr::Var(VarKind::Ambient, i))
    }

    #[test]
    fn parses_sum_of_power_and_sine() {
        let e = Expression::parse("x1^2 + sin(x2)", 2).unwrap();
        let expected = Expr::Binary(
            BinOp::Add,
            Box::new(Expr::Binary(BinOp::Pow, var(0), Box::new(Expr::Num(2.0)))),
            Box::new(Expr::Call(Func::Sin, var(1))),
        );
        assert_eq!(e.ast(), &expected);
    }

    #[test]
    fn reports_offset_of_unexpected_operator() {
        let err = Expression::parse("x1 + * x2", 2).unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(err.message.contains("unexpected '*'"), "{}", err.message);
        assert!(err.expected.contains(&"variable"));
    }

    #[test]
    fn rejects_variable_beyond_arity() {
        let err = Expression::parse("x3", 2).unwrap_err();
        assert!(err.message.contains("variable x3 exceeds arity 2"), "{}", err.message);
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn rejects_unknown_identifiers_and_wrong_kind() {
        assert!(Expression::parse("foo(x1)", 1).is_err());
        assert!(Expression::parse("y1", 1).is_err());
        assert!(Expression::parse("x0", 1).is_err());
        assert!(Expression::parse_in("u1", 1, VarKind::Ambient).is_err());
        assert!(Expression::parse("sin x1", 1).is_err());
        assert!(Expression::parse("", 1).is_err());
        assert!(Expression::parse("(x1", 1).is_err());
        assert!(Expression::parse("x1 x2", 2).is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        let e = |s: &str, p: &[f64]| Expression::parse(s, p.len()).unwrap().evaluate(p).unwrap();
        assert_eq!(e("-x1^2", &[3.0]), -9.0);
        assert_eq!(e("2^3^2", &[]), 512.0);
        assert_eq!(e("2^-1", &[]), 0.5);
        assert_eq!(e("8 / 4 / 2", &[]), 1.0);
        assert_eq!(e("1 - 2 - 3", &[]), -4.0);
        assert_eq!(e("1 + 2 * 3", &[]), 7.0);
        assert_eq!(e("(1 + 2) * 3", &[]), 9.0);
        assert_eq!(e("1.5e1 + .5", &[]), 15.5);
        assert!((e("cos(pi)", &[]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn evaluates_examples() {
        let e = Expression::parse("x1^2+sin(x2)", 2).unwrap();
        assert_eq!(e.evaluate(&[2.0, 0.0]).unwrap(), 4.0);
        let e = Expression::parse("x1*x2", 2).unwrap();
        assert_eq!(e.evaluate(&[3.0, 5.0]).unwrap(), 15.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = Expression::parse("1/x1", 2).unwrap();
        match e.evaluate(&[0.0, 1.0]) {
            Err(EvalError::Domain { subexpr, .. }) => assert_eq!(subexpr, "1.0 / x1"),
            other => panic!("expected domain error, got {other:?}"),
        }
        let e = Expression::parse("x2 + log(x1 - 1)", 2).unwrap();
        assert!(matches!(e.evaluate(&[1.0, 0.0]), Err(EvalError::Domain { .. })));
        let e = Expression::parse("(x1 - 1)^0.5", 1).unwrap();
        assert!(e.evaluate(&[0.5]).is_err());
        assert!(Expression::parse("x1^2", 1).unwrap().evaluate(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        let e = Expression::parse("x1^3", 1).unwrap();
        assert_eq!(e.evaluate(&[-2.0]).unwrap(), -8.0);
        let j = e.evaluate_jet(&[-2.0], JetOrder::Second).unwrap();
        assert_eq!(j.gradient, vec![12.0]);
        assert_eq!(j.hessian(0, 0), -12.0);
    }

    #[test]
    fn jet_examples() {
        let e = Expression::parse("x1*x2", 2).unwrap();
        let j = e.evaluate_jet(&[3.0, 5.0], JetOrder::First).unwrap();
        assert_eq!(j.value, 15.0);
        assert_eq!(j.gradient, vec![5.0, 3.0]);

        let e = Expression::parse("sin(x1)", 1).unwrap();
        let j = e.evaluate_jet(&[0.0], JetOrder::Second).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.gradient, vec![1.0]);
        assert_eq!(j.hessian(0, 0), 0.0);
    }

    #[test]
    fn hessian_of_cubic_monomial_matches_central_differences() {
        let e = Expression::parse("x1^2*x2", 2).unwrap();
        let p = [1.0, 2.0];
        let j = e.evaluate_jet(&p, JetOrder::Second).unwrap();
        // oracle: second-order central differences, step 1e-4
        let h = 1e-4;
        let f = |a: f64, b: f64| e.evaluate(&[a, b]).unwrap();
        let fd = [
            [
                (f(p[0] + h, p[1]) - 2.0 * f(p[0], p[1]) + f(p[0] - h, p[1])) / (h * h),
                (f(p[0] + h, p[1] + h) - f(p[0] + h, p[1] - h) - f(p[0] - h, p[1] + h)
                    + f(p[0] - h, p[1] - h))
                    / (4.0 * h * h),
            ],
            [0.0, (f(p[0], p[1] + h) - 2.0 * f(p[0], p[1]) + f(p[0], p[1] - h)) / (h * h)],
        ];
        assert!((fd[0][0] - 4.0).abs() < 1e-6 && (fd[0][1] - 2.0).abs() < 1e-6 && fd[1][1].abs() < 1e-6);
        assert_eq!(j.hessian_matrix(), vec![vec![4.0, 2.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn display_round_trips_shape() {
        for src in [
            "x1 - (x2 - x3)",
            "(x1 - x2) - x3",
            "x1 / (x2 * x3)",
            "-(x1 + x2)^2",
            "(-x1)^2",
            "x1^x2^x3",
            "(x1^x2)^x3",
            "x1^-x2",
            "--x1",
            "exp(-x1 * 1e-7) + 1e300 * x2",
        ] {
            let e = Expression::parse(src, 3).unwrap();
            let again = Expression::parse(&e.to_string(), 3).unwrap();
            assert_eq!(e, again, "{src} printed as {e}");
        }
    }
}
