//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;

use affinor::chart::{ManifoldSpec, Mu};
use affinor::expr::{BinOp, Expr, Expression, Func, JetOrder, VarKind};

pub fn var(i: usize) -> Expr {
    Expr::Var(VarKind::Ambient, i)
}

pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary(op, Box::new(a), Box::new(b))
}

pub fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

fn one_plus_square(a: Expr) -> Expr {
    bin(BinOp::Add, Expr::Num(1.0), bin(BinOp::Pow, a, Expr::Num(2.0)))
}

/// Arguments of `log`, `sqrt`, `tan` and denominators are kept off their singular sets.
fn guarded(f: Func, a: Expr) -> Expr {
    match f {
        Func::Log | Func::Sqrt => call(f, one_plus_square(a)),
        Func::Tan => call(f, call(Func::Sin, a)),
        _ => call(f, a),
    }
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![(0usize..3).prop_map(var), (0.1f64..3.0).prop_map(Expr::Num)]
}

/// Random expressions in three variables, depth at most 6.
pub fn expression() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul]))
                .prop_map(|(a, b, op)| bin(op, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinOp::Div, a, one_plus_square(b))),
            (inner.clone(), 2u8..4).prop_map(|(a, k)| bin(BinOp::Pow, a, Expr::Num(k as f64))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner, prop::sample::select(Func::all().to_vec())).prop_map(|(a, f)| guarded(f, a)),
        ]
    })
}

pub fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

/// Fourth-order central difference of `f` along coordinate `i`.
pub fn five_point(f: impl Fn(&[f64]) -> f64, p: &[f64], i: usize, h: f64) -> f64 {
    let at = |t: f64| {
        let mut q = p.to_vec();
        q[i] += t;
        f(&q)
    };
    (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h)
}

/// Worst relative disagreement between the jet and finite differences of its value and gradient.
///
/// `None` when the expression is undefined or too large at `p` for differences to be meaningful.
pub fn jet_fd_disagreement(e: &Expression, p: &[f64]) -> Option<f64> {
    let jet = e.evaluate_jet(p, JetOrder::Second).ok()?;
    if !(jet.value.is_finite() && jet.value.abs() < 1e4) {
        return None;
    }
    if !jet.gradient.iter().all(|g| g.is_finite() && g.abs() < 1e4) {
        return None;
    }
    let value = |q: &[f64]| e.evaluate(q).unwrap_or(f64::NAN);
    let mut worst = 0.0f64;
    for i in 0..3 {
        let g = jet.gradient[i];
        let fd = five_point(value, p, i, 1e-3);
        if !fd.is_finite() {
            return None;
        }
        worst = worst.max((g - fd).abs() / (1.0 + g.abs()));
        for j in 0..3 {
            let h = jet.hessian(i, j);
            let grad_j = |q: &[f64]| e.evaluate_jet(q, JetOrder::First).map_or(f64::NAN, |jt| jt.gradient[j]);
            let fd = five_point(grad_j, p, i, 1e-3);
            if !(fd.is_finite() && h.abs() < 1e4) {
                return None;
            }
            worst = worst.max((h - fd).abs() / (1.0 + h.abs()));
        }
    }
    Some(worst)
}

pub fn curved() -> Arc<ManifoldSpec> {
    Arc::new(
        ManifoldSpec::from_sources(
            "curved",
            Mu::Plus,
            &[
                &["1 + x1^2", "0.3*sin(x2)", "0"],
                &["0.3*sin(x2)", "2 + cos(x1*x3)", "0.1*x1"],
                &["0", "0.1*x1", "exp(0.2*x2)"],
            ],
            &[&["0", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]],
            &[(-1.0, 1.0); 3],
        )
        .unwrap(),
    )
}

/// `max |∇_k g_ij|` and `max |Γ^k_ij − Γ^k_ji|`, with `∂g` from differences of the metric.
pub fn levi_civita_defects(m: &ManifoldSpec, x: &[f64]) -> (f64, f64) {
    let n = m.dim;
    let g = m.metric_at(x).unwrap();
    let gamma = m.christoffel(x).unwrap();
    let mut compat = 0.0f64;
    let mut torsion = 0.0f64;
    for k in 0..n {
        let dg_k = {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[k] += 1e-5;
            minus[k] -= 1e-5;
            (m.metric_at(&plus).unwrap() - m.metric_at(&minus).unwrap()) / 2e-5
        };
        for i in 0..n {
            for j in 0..n {
                let mut r = dg_k[(i, j)];
                for l in 0..n {
                    r -= gamma.get(l, k, i) * g[(l, j)] + gamma.get(l, k, j) * g[(i, l)];
                }
                compat = compat.max(r.abs());
                torsion = torsion.max((gamma.get(k, i, j) - gamma.get(k, j, i)).abs());
            }
        }
    }
    (compat, torsion)
}
