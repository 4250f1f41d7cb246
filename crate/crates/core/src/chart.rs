//! Pointwise tensor calculus on a single coordinate chart.
//!
//! Index conventions: metric components `g_ij` carry lower indices; affinor
//! components `F^i_j` are stored row-major with the row as the upper index,
//! so `(FX)^i = F^i_j X^j` is an ordinary matrix-vector product.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::GeomError;
use crate::expr::{Expression, JetOrder};
use crate::linalg::InnerProduct;
use crate::tolerance::{FD_STEP, METRIC_MIN_EIGENVALUE, METRIC_SYMMETRY};

/// Sign in the compatibility condition `g(FX, Y) + μ g(X, FY) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mu {
    Plus,
    Minus,
}

impl Mu {
    pub fn value(self) -> f64 {
        match self {
            Mu::Plus => 1.0,
            Mu::Minus => -1.0,
        }
    }

    pub fn from_int(v: i64) -> Option<Mu> {
        match v {
            1 => Some(Mu::Plus),
            -1 => Some(Mu::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mu::Plus => "+1",
            Mu::Minus => "-1",
        })
    }
}

/// Closed sampling interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// A `(g, F, μ)` structure on one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub name: String,
    pub dim: usize,
    pub mu: Mu,
    /// Row-major `g_ij`.
    pub metric: Vec<Expression>,
    /// Row-major `F^i_j`.
    pub affinor: Vec<Expression>,
    pub domain: Vec<Interval>,
}

impl ManifoldSpec {
    /// Builds a spec from component sources, parsing each over `x1..x{dim}`.
    pub fn from_sources(
        name: &str,
        mu: Mu,
        metric: &[&[&str]],
        affinor: &[&[&str]],
        domain: &[(f64, f64)],
    ) -> Result<Self, String> {
        let dim = metric.len();
        let parse_matrix = |label: &str, rows: &[&[&str]]| -> Result<Vec<Expression>, String> {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(format!("{label} must be {dim}x{dim}"));
            }
            rows.iter()
                .flat_map(|r| r.iter())
                .map(|src| {
                    Expression::parse_in(src, dim, crate::expr::VarKind::Ambient)
                        .map_err(|e| format!("{label} entry `{src}`: {e}"))
                })
                .collect()
        };
        let spec = Self {
            name: name.to_string(),
            dim,
            mu,
            metric: parse_matrix("metric", metric)?,
            affinor: parse_matrix("affinor", affinor)?,
            domain: domain.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect(),
        };
        spec.validate_shape()?;
        Ok(spec)
    }

    pub fn validate_shape(&self) -> Result<(), String> {
        let m = self.dim;
        if m == 0 {
            return Err("dimension must be positive".into());
        }
        if self.metric.len() != m * m || self.affinor.len() != m * m {
            return Err(format!("metric and affinor must have {m}x{m} entries"));
        }
        if self.domain.len() != m {
            return Err(format!("domain must have {m} intervals"));
        }
        if let Some(iv) = self.domain.iter().find(|iv| !(iv.hi > iv.lo)) {
            return Err(format!("domain interval [{}, {}] has no positive length", iv.lo, iv.hi));
        }
        Ok(())
    }

    fn eval_matrix(&self, entries: &[Expression], x: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        let m = self.dim;
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = entries[i * m + j].evaluate(x)?;
            }
        }
        Ok(out)
    }

    /// Matrix and its first partials `∂_k` (one matrix per `k`).
    fn eval_matrix_jets(
        &self,
        entries: &[Expression],
        x: &[f64],
    ) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>), GeomError> {
        let m = self.dim;
        let mut value = DMatrix::zeros(m, m);
        let mut partials = vec![DMatrix::zeros(m, m); m];
        for i in 0..m {
            for j in 0..m {
                let e = &entries[i * m + j];
                if let Some(c) = e.constant_value() {
                    value[(i, j)] = c;
                    continue;
                }
                let jet = e.evaluate_jet(x, JetOrder::First)?;
                value[(i, j)] = jet.value;
                for (k, d) in jet.gradient.iter().enumerate() {
                    partials[k][(i, j)] = *d;
                }
            }
        }
        Ok((value, partials))
    }

    fn check_metric(&self, g: &DMatrix<f64>, x: &[f64]) -> Result<(), GeomError> {
        let m = self.dim;
        for i in 0..m {
            for j in (i + 1)..m {
                let difference = g[(i, j)] - g[(j, i)];
                if difference.abs() > METRIC_SYMMETRY * (1.0 + g[(i, j)].abs()) {
                    return Err(GeomError::AsymmetricMetric {
                        point: x.to_vec(),
                        i,
                        j,
                        difference,
                    });
                }
            }
        }
        let min_eigenvalue = g.clone().symmetric_eigenvalues().min();
        if min_eigenvalue.partial_cmp(&METRIC_MIN_EIGENVALUE) != Some(std::cmp::Ordering::Greater) {
            return Err(GeomError::NotPositiveDefinite {
                point: x.to_vec(),
                min_eigenvalue,
            });
        }
        Ok(())
    }

    fn check_point(&self, x: &[f64]) -> Result<(), GeomError> {
        if x.len() != self.dim {
            return Err(GeomError::Dimension(format!(
                "point has {} coordinates, manifold dimension is {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Metric matrix `g_ij(x)`; rejects asymmetric or non-positive-definite values.
    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        self.check_point(x)?;
        let g = self.eval_matrix(&self.metric, x)?;
        self.check_metric(&g, x)?;
        Ok(g)
    }

    pub fn affinor_at(&self, x: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        self.check_point(x)?;
        self.eval_matrix(&self.affinor, x)
    }

    /// Christoffel symbols of the Levi-Civita connection.
    pub fn christoffel(&self, x: &[f64]) -> Result<Christoffel, GeomError> {
        self.check_point(x)?;
        let (g, dg) = self.eval_matrix_jets(&self.metric, x)?;
        self.check_metric(&g, x)?;
        let g_inv = g.clone().try_inverse().ok_or_else(|| GeomError::NotPositiveDefinite {
            point: x.to_vec(),
            min_eigenvalue: 0.0,
        })?;
        Ok(Christoffel::from_metric(&g_inv, &dg))
    }

    /// Everything the submanifold and integrability layers need at one ambient point.
    pub fn geometry_at(&self, x: &[f64]) -> Result<PointGeometry, GeomError> {
        self.check_point(x)?;
        let (g, dg) = self.eval_matrix_jets(&self.metric, x)?;
        self.check_metric(&g, x)?;
        let inner = InnerProduct::new(g.clone()).ok_or_else(|| GeomError::NotPositiveDefinite {
            point: x.to_vec(),
            min_eigenvalue: 0.0,
        })?;
        let g_inv = g.clone().try_inverse().ok_or_else(|| GeomError::NotPositiveDefinite {
            point: x.to_vec(),
            min_eigenvalue: 0.0,
        })?;
        let christoffel = Christoffel::from_metric(&g_inv, &dg);
        let (affinor, affinor_partials) = self.eval_matrix_jets(&self.affinor, x)?;
        Ok(PointGeometry {
            x: x.to_vec(),
            metric: g,
            metric_inverse: g_inv,
            inner,
            christoffel,
            affinor,
            affinor_partials,
            mu: self.mu,
        })
    }

    /// Components `(∇̃_k F)^i_j = ∂_k F^i_j + Γ^i_{kl} F^l_j − Γ^l_{kj} F^i_l`.
    pub fn nabla_affinor(&self, x: &[f64]) -> Result<NablaAffinor, GeomError> {
        Ok(self.geometry_at(x)?.nabla_affinor())
    }

    /// The affinor as a (1,1)-tensor field with exact derivatives.
    pub fn affinor_field(&self) -> Arc<dyn AffinorField> {
        Arc::new(ExprAffinor::new(self.dim, self.affinor.clone()))
    }
}

/// `Γ^k_{ij}`, stored as one symmetric `m×m` matrix per upper index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    symbols: Vec<DMatrix<f64>>,
}

impl Christoffel {
    /// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`, symmetrized in `(i, j)`.
    pub fn from_metric(g_inv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Self {
        let m = g_inv.nrows();
        // lowered symbols Γ_{l,ij}
        let mut lowered = vec![DMatrix::zeros(m, m); m];
        for (l, low) in lowered.iter_mut().enumerate() {
            for i in 0..m {
                for j in i..m {
                    let v = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    low[(i, j)] = v;
                    low[(j, i)] = v;
                }
            }
        }
        let symbols = (0..m)
            .map(|k| {
                let mut s = DMatrix::zeros(m, m);
                for (l, low) in lowered.iter().enumerate() {
                    let c = g_inv[(k, l)];
                    if c != 0.0 {
                        s += low * c;
                    }
                }
                s
            })
            .collect();
        Self { symbols }
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    /// `Γ^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.symbols[k][(i, j)]
    }

    /// The vector `Γ^k_{ij} a^i b^j`.
    pub fn contract(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.symbols.iter().map(|s| (a.transpose() * s * b)[(0, 0)]))
    }

    /// The matrix `(Γ_a)^k_j = Γ^k_{ij} a^i`.
    pub fn contract_first(&self, a: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |k, j| (0..m).map(|i| self.symbols[k][(i, j)] * a[i]).sum())
    }
}

/// `(∇̃_k F)^i_j` stored as one matrix per differentiation index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NablaAffinor {
    components: Vec<DMatrix<f64>>,
}

impl NablaAffinor {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.components[k][(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.abs().max()).fold(0.0, f64::max)
    }

    /// Position `(k, i, j)` and value of the largest component in magnitude.
    pub fn argmax(&self) -> (usize, usize, usize, f64) {
        let mut best = (0, 0, 0, 0.0f64);
        for (k, c) in self.components.iter().enumerate() {
            for i in 0..c.nrows() {
                for j in 0..c.ncols() {
                    if c[(i, j)].abs() > best.3.abs() {
                        best = (k, i, j, c[(i, j)]);
                    }
                }
            }
        }
        best
    }
}

/// Metric, connection and affinor data at one ambient point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub x: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inverse: DMatrix<f64>,
    pub inner: InnerProduct,
    pub christoffel: Christoffel,
    pub affinor: DMatrix<f64>,
    /// `∂_k F`, one matrix per coordinate.
    pub affinor_partials: Vec<DMatrix<f64>>,
    pub mu: Mu,
}

impl PointGeometry {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn apply_affinor(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.affinor * v
    }

    pub fn nabla_affinor(&self) -> NablaAffinor {
        let m = self.dim();
        let f = &self.affinor;
        let components = (0..m)
            .map(|k| {
                let mut e_k = DVector::zeros(m);
                e_k[k] = 1.0;
                // (Γ_k)^i_l = Γ^i_{kl}
                let gamma_k = self.christoffel.contract_first(&e_k);
                &self.affinor_partials[k] + &gamma_k * f - f * &gamma_k
            })
            .collect();
        NablaAffinor { components }
    }

    /// Directional partial derivative `Σ_k v^k ∂_k F`.
    pub fn affinor_derivative_along(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        for (k, p) in self.affinor_partials.iter().enumerate() {
            if v[k] != 0.0 {
                out += p * v[k];
            }
        }
        out
    }

    /// Nijenhuis tensor evaluated pointwise from the coordinate derivatives of `F`:
    /// `N(X,Y) = (∂_{FX}F)Y − (∂_{FY}F)X − F(∂_X F)Y + F(∂_Y F)X`.
    pub fn nijenhuis(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let f = &self.affinor;
        let fx = f * x;
        let fy = f * y;
        self.affinor_derivative_along(&fx) * y - self.affinor_derivative_along(&fy) * x
            - f * (self.affinor_derivative_along(x) * y)
            + f * (self.affinor_derivative_along(y) * x)
    }
}

/// A smooth map `ℝ^k → ℝ^d` viewed as a vector field (or a vector-valued
/// field along a parametrization when `k ≠ d`).
pub trait VectorField: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn eval(&self, p: &[f64]) -> Result<DVector<f64>, GeomError>;

    /// `∂_j V^i` as a `d×k` matrix. Defaults to central differences with step [`FD_STEP`].
    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        central_difference_jacobian(|q| self.eval(q), p, self.output_dim())
    }
}

pub fn central_difference_jacobian<F>(f: F, p: &[f64], out_dim: usize) -> Result<DMatrix<f64>, GeomError>
where
    F: Fn(&[f64]) -> Result<DVector<f64>, GeomError>,
{
    let mut jac = DMatrix::zeros(out_dim, p.len());
    let mut q = p.to_vec();
    for j in 0..p.len() {
        q[j] = p[j] + FD_STEP;
        let plus = f(&q)?;
        q[j] = p[j] - FD_STEP;
        let minus = f(&q)?;
        q[j] = p[j];
        jac.set_column(j, &((plus - minus) / (2.0 * FD_STEP)));
    }
    Ok(jac)
}

/// Field whose components are expressions; derivatives are exact jets.
#[derive(Debug, Clone)]
pub struct ExprField {
    input_dim: usize,
    components: Vec<Expression>,
}

impl ExprField {
    pub fn new(input_dim: usize, components: Vec<Expression>) -> Self {
        assert!(components.iter().all(|c| c.arity() == input_dim));
        Self { input_dim, components }
    }

    /// Parses ambient-coordinate component sources.
    pub fn parse(input_dim: usize, sources: &[&str]) -> Result<Self, crate::expr::ParseError> {
        let components = sources
            .iter()
            .map(|s| Expression::parse(s, input_dim))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(input_dim, components))
    }

    pub fn constant(values: &[f64]) -> Self {
        let n = values.len();
        Self::new(n, values.iter().map(|&v| Expression::constant(v, n)).collect())
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }
}

impl VectorField for ExprField {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, p: &[f64]) -> Result<DVector<f64>, GeomError> {
        let values = self
            .components
            .iter()
            .map(|c| c.evaluate(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(values))
    }

    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        let mut jac = DMatrix::zeros(self.components.len(), self.input_dim);
        for (i, c) in self.components.iter().enumerate() {
            if c.constant_value().is_some() {
                continue;
            }
            let jet = c.evaluate_jet(p, JetOrder::First)?;
            for (j, d) in jet.gradient.iter().enumerate() {
                jac[(i, j)] = *d;
            }
        }
        Ok(jac)
    }
}

/// Field given by an arbitrary closure; differentiated by central differences.
pub struct FnField<F> {
    input_dim: usize,
    output_dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64]) -> Result<DVector<f64>, GeomError> + Send + Sync,
{
    pub fn new(input_dim: usize, output_dim: usize, f: F) -> Self {
        Self { input_dim, output_dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64]) -> Result<DVector<f64>, GeomError> + Send + Sync,
{
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        self.output_dim
    }

    fn eval(&self, p: &[f64]) -> Result<DVector<f64>, GeomError> {
        (self.f)(p)
    }
}

/// A pointwise linear map field (a (1,1)-tensor field on a chart).
pub trait AffinorField: Send + Sync {
    fn dim(&self) -> usize;
    fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>, GeomError>;

    /// Exact partials `∂_k A`, when available.
    fn partials_at(&self, _p: &[f64]) -> Option<Result<Vec<DMatrix<f64>>, GeomError>> {
        None
    }
}

pub struct ExprAffinor {
    dim: usize,
    entries: Vec<Expression>,
}

impl ExprAffinor {
    pub fn new(dim: usize, entries: Vec<Expression>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn parse(dim: usize, rows: &[&[&str]]) -> Result<Self, crate::expr::ParseError> {
        let entries = rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|s| Expression::parse(s, dim))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(dim, entries))
    }
}

impl AffinorField for ExprAffinor {
    fn dim(&self) -> usize {
        self.dim
    }

    fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        let m = self.dim;
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self.entries[i * m + j].evaluate(p)?;
            }
        }
        Ok(out)
    }

    fn partials_at(&self, p: &[f64]) -> Option<Result<Vec<DMatrix<f64>>, GeomError>> {
        let m = self.dim;
        let compute = || {
            let mut partials = vec![DMatrix::zeros(m, m); p.len()];
            for i in 0..m {
                for j in 0..m {
                    let e = &self.entries[i * m + j];
                    if e.constant_value().is_some() {
                        continue;
                    }
                    let jet = e.evaluate_jet(p, JetOrder::First)?;
                    for (k, d) in jet.gradient.iter().enumerate() {
                        partials[k][(i, j)] = *d;
                    }
                }
            }
            Ok(partials)
        };
        Some(compute())
    }
}

pub struct FnAffinor<F> {
    dim: usize,
    f: F,
}

impl<F> FnAffinor<F>
where
    F: Fn(&[f64]) -> Result<DMatrix<f64>, GeomError> + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> AffinorField for FnAffinor<F>
where
    F: Fn(&[f64]) -> Result<DMatrix<f64>, GeomError> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        (self.f)(p)
    }
}

/// The field `p ↦ A(p) X(p)`.
pub struct AppliedField {
    affinor: Arc<dyn AffinorField>,
    field: Arc<dyn VectorField>,
}

impl AppliedField {
    pub fn new(affinor: Arc<dyn AffinorField>, field: Arc<dyn VectorField>) -> Self {
        Self { affinor, field }
    }
}

impl VectorField for AppliedField {
    fn input_dim(&self) -> usize {
        self.field.input_dim()
    }

    fn output_dim(&self) -> usize {
        self.affinor.dim()
    }

    fn eval(&self, p: &[f64]) -> Result<DVector<f64>, GeomError> {
        Ok(self.affinor.matrix_at(p)? * self.field.eval(p)?)
    }

    /// Product rule when the affinor has exact partials; otherwise differences of the product.
    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        match self.affinor.partials_at(p) {
            Some(partials) => {
                let partials = partials?;
                let a = self.affinor.matrix_at(p)?;
                let x = self.field.eval(p)?;
                let mut jac = &a * self.field.jacobian(p)?;
                for (k, dk) in partials.iter().enumerate() {
                    let col = jac.column(k) + dk * &x;
                    jac.set_column(k, &col);
                }
                Ok(jac)
            }
            None => central_difference_jacobian(|q| self.eval(q), p, self.output_dim()),
        }
    }
}

/// `(∇̃_X Y)^k = X^i ∂_i Y^k + Γ^k_{ij} X^i Y^j`.
pub fn covariant_derivative(
    manifold: &ManifoldSpec,
    x_field: &dyn VectorField,
    y_field: &dyn VectorField,
    x: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let gamma = manifold.christoffel(x)?;
    let xv = x_field.eval(x)?;
    let yv = y_field.eval(x)?;
    Ok(y_field.jacobian(x)? * &xv + gamma.contract(&xv, &yv))
}

/// `[X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k`.
pub fn lie_bracket(
    x_field: &dyn VectorField,
    y_field: &dyn VectorField,
    p: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let xv = x_field.eval(p)?;
    let yv = y_field.eval(p)?;
    Ok(y_field.jacobian(p)? * xv - x_field.jacobian(p)? * yv)
}

/// `N_A(X,Y) = [AX,AY] + A²[X,Y] − A[AX,Y] − A[X,AY]`, with `AX`, `AY` built as applied fields.
pub fn nijenhuis_of(
    affinor: &Arc<dyn AffinorField>,
    x_field: &Arc<dyn VectorField>,
    y_field: &Arc<dyn VectorField>,
    p: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let ax: Arc<dyn VectorField> = Arc::new(AppliedField::new(affinor.clone(), x_field.clone()));
    let ay: Arc<dyn VectorField> = Arc::new(AppliedField::new(affinor.clone(), y_field.clone()));
    let a = affinor.matrix_at(p)?;
    let xy = lie_bracket(x_field.as_ref(), y_field.as_ref(), p)?;
    let axay = lie_bracket(ax.as_ref(), ay.as_ref(), p)?;
    let ax_y = lie_bracket(ax.as_ref(), y_field.as_ref(), p)?;
    let x_ay = lie_bracket(x_field.as_ref(), ay.as_ref(), p)?;
    Ok(axay + &a * (&a * xy) - &a * (ax_y + x_ay))
}
