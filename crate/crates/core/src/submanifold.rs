//! Embedded submanifolds: frames, induced metric, second fundamental form,
//! Weingarten operator and the Gauss–Weingarten consistency checks.
//!
//! Tangent vectors appear in two guises: parameter coordinates `ξ ∈ ℝⁿ`
//! and their ambient pushforward `Jξ ∈ ℝᵐ`. Normal vectors are always ambient.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::{central_difference_jacobian, Interval, ManifoldSpec, PointGeometry, VectorField};
use crate::error::GeomError;
use crate::expr::{Expression, JetOrder, VarKind};
use crate::linalg::{numeric_rank, sorted_svd};
use crate::report::{CheckReport, Status};
use crate::sampling::{map_samples, Extremum};
use crate::tolerance::{
    DUALITY, FRAME_ORTHONORMALITY, GAUSS_SPLIT, H_SYMMETRY, NORMALITY, NORMAL_SKIP, TOTALLY_GEODESIC,
};

pub const FRAMES_ID: &str = "frames";
pub const H_SYMMETRY_ID: &str = "second_fundamental_form_symmetry";
pub const GAUSS_SPLIT_ID: &str = "gauss_split";
pub const DUALITY_ID: &str = "gauss_weingarten_duality";
pub const TOTALLY_GEODESIC_ID: &str = "totally_geodesic";

#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldSpec {
    pub name: String,
    pub dim: usize,
    /// `f^i(u1..un)`, one per ambient coordinate.
    pub embedding: Vec<Expression>,
    pub ambient: Arc<ManifoldSpec>,
    pub domain: Vec<Interval>,
    /// Optional frame of `D`, each vector in parameter coordinates.
    pub frame_d: Option<Vec<Vec<Expression>>>,
}

impl SubmanifoldSpec {
    pub fn from_sources(
        name: &str,
        ambient: Arc<ManifoldSpec>,
        embedding: &[&str],
        domain: &[(f64, f64)],
    ) -> Result<Self, String> {
        let n = domain.len();
        let embedding = embedding
            .iter()
            .map(|s| Expression::parse_in(s, n, VarKind::Param).map_err(|e| format!("embedding `{s}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = Self {
            name: name.to_string(),
            dim: n,
            embedding,
            ambient,
            domain: domain.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect(),
            frame_d: None,
        };
        spec.validate_shape()?;
        Ok(spec)
    }

    pub fn with_frame_d(mut self, rows: &[&[&str]]) -> Result<Self, String> {
        let n = self.dim;
        let frame = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| Expression::parse_in(s, n, VarKind::Param).map_err(|e| format!("frame_D `{s}`: {e}")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.frame_d = Some(frame);
        self.validate_shape()?;
        Ok(self)
    }

    pub fn validate_shape(&self) -> Result<(), String> {
        let (n, m) = (self.dim, self.ambient.dim);
        if n == 0 || n >= m {
            return Err(format!("submanifold dimension {n} must satisfy 0 < n < {m}"));
        }
        if self.embedding.len() != m {
            return Err(format!("embedding needs {m} components, got {}", self.embedding.len()));
        }
        if self.domain.len() != n {
            return Err(format!("domain must have {n} intervals"));
        }
        if let Some(iv) = self.domain.iter().find(|iv| !(iv.hi > iv.lo)) {
            return Err(format!("domain interval [{}, {}] has no positive length", iv.lo, iv.hi));
        }
        if let Some(frame) = &self.frame_d {
            if frame.len() > n || frame.iter().any(|v| v.len() != n) {
                return Err(format!("frame_D rows must have {n} entries and at most {n} rows"));
            }
        }
        Ok(())
    }

    pub fn embed(&self, u: &[f64]) -> Result<DVector<f64>, GeomError> {
        let v = self.embedding.iter().map(|e| e.evaluate(u)).collect::<Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(v))
    }

    /// `∂f^i/∂u_a` as an `m×n` matrix.
    pub fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        let mut jac = DMatrix::zeros(self.embedding.len(), self.dim);
        for (i, e) in self.embedding.iter().enumerate() {
            if e.constant_value().is_some() {
                continue;
            }
            let jet = e.evaluate_jet(u, JetOrder::First)?;
            for (a, d) in jet.gradient.iter().enumerate() {
                jac[(i, a)] = *d;
            }
        }
        Ok(jac)
    }

    fn second_order(&self, u: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>, Vec<DMatrix<f64>>), GeomError> {
        let (m, n) = (self.embedding.len(), self.dim);
        let mut x = DVector::zeros(m);
        let mut jac = DMatrix::zeros(m, n);
        let mut hess = vec![DMatrix::zeros(n, n); m];
        for (i, e) in self.embedding.iter().enumerate() {
            if let Some(c) = e.constant_value() {
                x[i] = c;
                continue;
            }
            let jet = e.evaluate_jet(u, JetOrder::Second)?;
            x[i] = jet.value;
            for a in 0..n {
                jac[(i, a)] = jet.gradient[a];
                for b in 0..n {
                    hess[i][(a, b)] = jet.hessian(a, b);
                }
            }
        }
        Ok((x, jac, hess))
    }

    /// Parameter-coordinate vector fields spanning the declared `D`, if any.
    pub fn frame_d_fields(&self) -> Option<Vec<Arc<dyn VectorField>>> {
        self.frame_d.as_ref().map(|rows| {
            rows.iter()
                .map(|r| Arc::new(crate::chart::ExprField::new(self.dim, r.clone())) as Arc<dyn VectorField>)
                .collect()
        })
    }
}

/// Frames and ambient geometry at one point of `N`.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub u: Vec<f64>,
    pub x: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    /// Per ambient component, the `n×n` Hessian of `f^i`.
    pub hessian: Vec<DMatrix<f64>>,
    /// `n` g-orthonormal ambient columns.
    pub tangent_basis: DMatrix<f64>,
    /// `m − n` g-orthonormal ambient columns.
    pub normal_basis: DMatrix<f64>,
    /// Ambient coordinate indices that seeded the normal basis.
    pub normal_pivots: Vec<usize>,
    pub geometry: PointGeometry,
    /// `(JᵀGJ)⁻¹JᵀG`: maps tangent ambient vectors to parameter coordinates.
    param_map: DMatrix<f64>,
}

impl FrameData {
    pub fn ambient_dim(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn inner(&self) -> &crate::linalg::InnerProduct {
        &self.geometry.inner
    }

    pub fn push(&self, xi: &DVector<f64>) -> DVector<f64> {
        &self.jacobian * xi
    }

    /// Parameter coordinates of the tangential part of `v`.
    pub fn param_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.param_map * v
    }

    pub fn tangential(&self, v: &DVector<f64>) -> DVector<f64> {
        self.inner().project(&self.tangent_basis, v)
    }

    pub fn normal(&self, v: &DVector<f64>) -> DVector<f64> {
        self.inner().project(&self.normal_basis, v)
    }

    /// Tangent basis vectors in parameter coordinates.
    pub fn tangent_basis_params(&self) -> Vec<DVector<f64>> {
        (0..self.dim())
            .map(|a| self.param_coords(&self.tangent_basis.column(a).into_owned()))
            .collect()
    }

    /// `H(ξ, η)^i = ξᵀ H_i η`.
    pub fn hessian_contract(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.hessian.len(), self.hessian.iter().map(|h| (xi.transpose() * h * eta)[(0, 0)]))
    }

    /// Ambient covariant derivative of the pushforward field along `ξ`, minus the
    /// term `J·DY·ξ`: `∂²f(ξ,η) + Γ(Jξ, Jη)`.
    pub fn second_order_part(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> DVector<f64> {
        self.hessian_contract(xi, eta) + self.geometry.christoffel.contract(&self.push(xi), &self.push(eta))
    }

    /// Gram matrix defect of the combined tangent and normal bases.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut all = DMatrix::zeros(self.ambient_dim(), self.ambient_dim());
        all.columns_mut(0, self.dim()).copy_from(&self.tangent_basis);
        all.columns_mut(self.dim(), self.ambient_dim() - self.dim()).copy_from(&self.normal_basis);
        self.inner().orthonormality_defect(&all)
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass; `None` when `v` collapses below `floor`.
fn orthonormalize_against(
    inner: &crate::linalg::InnerProduct,
    basis: &[DVector<f64>],
    v: &DVector<f64>,
    floor: f64,
) -> Option<DVector<f64>> {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = inner.dot(b, &w);
            w -= b * c;
        }
    }
    let norm = inner.norm(&w);
    (norm >= floor).then(|| w / norm)
}

pub fn frames_at(s: &SubmanifoldSpec, u: &[f64]) -> Result<FrameData, GeomError> {
    frames_with_pivots(s, u, None)
}

/// Frames at `u`; when `pivots` is given the normal basis is seeded from exactly those coordinates.
pub fn frames_with_pivots(s: &SubmanifoldSpec, u: &[f64], pivots: Option<&[usize]>) -> Result<FrameData, GeomError> {
    if u.len() != s.dim {
        return Err(GeomError::Dimension(format!(
            "parameter point has {} coordinates, submanifold dimension is {}",
            u.len(),
            s.dim
        )));
    }
    let (m, n) = (s.ambient.dim, s.dim);
    let (x, jacobian, hessian) = s.second_order(u)?;
    let sv = sorted_svd(&jacobian).singular_values;
    if numeric_rank(&sv) < n {
        return Err(GeomError::RankDeficient {
            point: u.to_vec(),
            singular_values: sv,
        });
    }
    let geometry = s.ambient.geometry_at(x.as_slice())?;
    let inner = &geometry.inner;

    let mut tangent = Vec::with_capacity(n);
    for a in 0..n {
        let col = jacobian.column(a).into_owned();
        let scale = inner.norm(&col).max(f64::MIN_POSITIVE);
        match orthonormalize_against(inner, &tangent, &col, 1e-8 * scale) {
            Some(t) => tangent.push(t),
            None => {
                return Err(GeomError::RankDeficient {
                    point: u.to_vec(),
                    singular_values: sv,
                })
            }
        }
    }

    let mut spanned = tangent.clone();
    let mut normals = Vec::with_capacity(m - n);
    let mut used = Vec::with_capacity(m - n);
    let candidates: Vec<usize> = match pivots {
        Some(p) => p.to_vec(),
        None => (0..m).collect(),
    };
    for k in candidates {
        if normals.len() == m - n {
            break;
        }
        let mut e = DVector::zeros(m);
        e[k] = 1.0;
        match orthonormalize_against(inner, &spanned, &e, NORMAL_SKIP) {
            Some(v) => {
                spanned.push(v.clone());
                normals.push(v);
                used.push(k);
            }
            None if pivots.is_some() => {
                return Err(GeomError::NormalPivotLost {
                    point: u.to_vec(),
                    pivot: k + 1,
                })
            }
            None => {}
        }
    }
    if normals.len() != m - n {
        return Err(GeomError::RankDeficient {
            point: u.to_vec(),
            singular_values: sv,
        });
    }

    let g = &geometry.metric;
    let induced = jacobian.transpose() * g * &jacobian;
    let induced_inv = induced.try_inverse().ok_or_else(|| GeomError::RankDeficient {
        point: u.to_vec(),
        singular_values: sv.clone(),
    })?;
    let param_map = induced_inv * jacobian.transpose() * g;

    Ok(FrameData {
        u: u.to_vec(),
        x,
        tangent_basis: crate::linalg::columns_to_matrix(m, &tangent),
        normal_basis: crate::linalg::columns_to_matrix(m, &normals),
        normal_pivots: used,
        jacobian,
        hessian,
        geometry,
        param_map,
    })
}

/// `(g_N)_{ab} = g(∂_a f, ∂_b f)`.
pub fn induced_metric(s: &SubmanifoldSpec, u: &[f64]) -> Result<DMatrix<f64>, GeomError> {
    let frame = frames_at(s, u)?;
    Ok(frame.jacobian.transpose() * &frame.geometry.metric * &frame.jacobian)
}

/// `h(ξ, η) = π_⊥(∂²f(ξ,η) + Γ(Jξ, Jη))` for parameter-coordinate vectors.
pub fn second_fundamental_form(frame: &FrameData, xi: &DVector<f64>, eta: &DVector<f64>) -> DVector<f64> {
    frame.normal(&frame.second_order_part(xi, eta))
}

/// `∇̃_X Y` for `X = Jξ` and the pushforward of a parameter-coordinate field `Y`.
pub fn ambient_derivative_of_tangent_field(
    frame: &FrameData,
    xi: &DVector<f64>,
    y_field: &dyn VectorField,
) -> Result<DVector<f64>, GeomError> {
    let y = y_field.eval(&frame.u)?;
    let dy = y_field.jacobian(&frame.u)? * xi;
    Ok(frame.push(&dy) + frame.second_order_part(xi, &y))
}

/// Induced connection `∇_X Y`: tangential part of `∇̃_X Y`, as an ambient vector.
pub fn induced_connection(
    frame: &FrameData,
    xi: &DVector<f64>,
    y_field: &dyn VectorField,
) -> Result<DVector<f64>, GeomError> {
    Ok(frame.tangential(&ambient_derivative_of_tangent_field(frame, xi, y_field)?))
}

/// `∇_X Y` from the value and Jacobian of a parameter-coordinate field `Y` at `frame.u`.
pub fn connection_from_jet(frame: &FrameData, xi: &DVector<f64>, y: &DVector<f64>, dy: &DMatrix<f64>) -> DVector<f64> {
    frame.tangential(&(frame.push(&(dy * xi)) + frame.second_order_part(xi, y)))
}

/// `A_V X` from the value and Jacobian of an ambient-valued normal field `V` at `frame.u`.
pub fn shape_operator_from_jet(frame: &FrameData, xi: &DVector<f64>, v: &DVector<f64>, dv: &DMatrix<f64>) -> DVector<f64> {
    let d = dv * xi + frame.geometry.christoffel.contract(&frame.push(xi), v);
    -frame.tangential(&d)
}

/// `∇̃_X V` for an ambient-valued field `V(u)` along `N`.
pub fn ambient_derivative_along(
    frame: &FrameData,
    xi: &DVector<f64>,
    v_field: &dyn VectorField,
) -> Result<DVector<f64>, GeomError> {
    let v = v_field.eval(&frame.u)?;
    let dv = v_field.jacobian(&frame.u)? * xi;
    Ok(dv + frame.geometry.christoffel.contract(&frame.push(xi), &v))
}

/// Tangential and normal parts of `∇̃_X V`: returns `(A_V X, ∇⊥_X V)`.
pub fn weingarten_operator(
    frame: &FrameData,
    v_field: &dyn VectorField,
    xi: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>), GeomError> {
    let v = v_field.eval(&frame.u)?;
    let tangential = frame.tangential(&v);
    let residual = frame.inner().norm(&tangential);
    if residual > NORMALITY * frame.inner().norm(&v).max(1.0) {
        return Err(GeomError::NotNormal {
            point: frame.u.clone(),
            residual,
        });
    }
    let d = ambient_derivative_along(frame, xi, v_field)?;
    Ok((-frame.tangential(&d), frame.normal(&d)))
}

/// The `k`-th normal basis vector as a field of `u`, with normal pivots frozen at `frame`.
pub fn normal_basis_field(s: &SubmanifoldSpec, frame: &FrameData, k: usize) -> Arc<dyn VectorField> {
    let s = s.clone();
    let pivots = frame.normal_pivots.clone();
    let m = s.ambient.dim;
    Arc::new(crate::chart::FnField::new(s.dim, m, move |u: &[f64]| {
        let f = frames_with_pivots(&s, u, Some(&pivots))?;
        Ok(f.normal_basis.column(k).into_owned())
    }))
}

/// Pushforward `u ↦ J(u)·Y(u)` of a parameter-coordinate field.
pub fn pushed_field(s: &SubmanifoldSpec, y_field: Arc<dyn VectorField>) -> Arc<dyn VectorField> {
    let s2 = s.clone();
    Arc::new(crate::chart::FnField::new(s.dim, s.ambient.dim, move |u: &[f64]| {
        Ok(s2.jacobian(u)? * y_field.eval(u)?)
    }))
}

fn unit(n: usize, a: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[a] = 1.0;
    e
}

fn sample_frames(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<Vec<FrameData>, GeomError> {
    if samples.is_empty() {
        return Err(GeomError::Dimension("no sample points".into()));
    }
    map_samples(samples, |u| frames_at(s, u))
}

fn max_per_sample<F>(frames: &[FrameData], f: F) -> Result<Extremum, GeomError>
where
    F: Fn(&FrameData) -> Result<f64, GeomError> + Sync + Send,
{
    let values: Vec<f64> = {
        use rayon::prelude::*;
        frames.par_iter().map(&f).collect::<Result<Vec<_>, _>>()?
    };
    let mut best = Extremum::zero();
    for (fr, v) in frames.iter().zip(values) {
        best.offer(v, &fr.u);
    }
    Ok(best)
}

pub fn frames_check(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<CheckReport, GeomError> {
    let frames = sample_frames(s, samples)?;
    let defect = max_per_sample(&frames, |f| Ok(f.orthonormality_defect()))?;
    let first = &frames[0].normal_pivots;
    let pivot_changes = frames.iter().filter(|f| &f.normal_pivots != first).count();
    let mut detail = format!(
        "normal pivots {:?}",
        first.iter().map(|k| k + 1).collect::<Vec<_>>()
    );
    if pivot_changes > 0 {
        detail.push_str(&format!("; warning: pivots change at {pivot_changes} samples"));
    }
    Ok(CheckReport::threshold(FRAMES_ID, defect.value, FRAME_ORTHONORMALITY)
        .with_witness(defect.witness)
        .with_detail(detail))
}

/// `h(∂_a, ∂_b)` computed from differences of the Jacobian column field.
fn h_from_differences(s: &SubmanifoldSpec, frame: &FrameData, a: usize, b: usize) -> Result<DVector<f64>, GeomError> {
    let n = s.dim;
    let column = |u: &[f64]| -> Result<DVector<f64>, GeomError> { Ok(s.jacobian(u)?.column(b).into_owned()) };
    let d = central_difference_jacobian(column, &frame.u, s.ambient.dim)?;
    let e_a = unit(n, a);
    let e_b = unit(n, b);
    let v = d * &e_a + frame.geometry.christoffel.contract(&frame.push(&e_a), &frame.push(&e_b));
    Ok(frame.normal(&v))
}

/// Largest `|h(∂_a,∂_b) − h(∂_b,∂_a)|` with `h` evaluated through differenced coordinate fields.
pub fn h_symmetry_check(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<CheckReport, GeomError> {
    let frames = sample_frames(s, samples)?;
    let r = max_per_sample(&frames, |f| {
        let mut worst = 0.0f64;
        for a in 0..s.dim {
            for b in (a + 1)..s.dim {
                let hab = h_from_differences(s, f, a, b)?;
                let hba = h_from_differences(s, f, b, a)?;
                worst = worst.max(f.inner().norm(&(hab - hba)));
            }
        }
        Ok(worst)
    })?;
    Ok(CheckReport::threshold(H_SYMMETRY_ID, r.value, H_SYMMETRY).with_witness(r.witness))
}

/// Reassembles `∇̃_X Y = ∇_X Y + h(X,Y)` for coordinate fields, comparing the
/// differenced ambient derivative with the jet-based tangential and normal parts.
pub fn gauss_split_check(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<CheckReport, GeomError> {
    let frames = sample_frames(s, samples)?;
    let n = s.dim;
    let r = max_per_sample(&frames, |f| {
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let e_a = unit(n, a);
                let coordinate: Arc<dyn VectorField> = Arc::new(crate::chart::ExprField::constant(
                    unit(n, b).as_slice(),
                ));
                let pushed = pushed_field(s, coordinate.clone());
                let direct = pushed.jacobian(&f.u)? * &e_a
                    + f.geometry.christoffel.contract(&f.push(&e_a), &f.push(&unit(n, b)));
                let tangential = induced_connection(f, &e_a, coordinate.as_ref())?;
                let h = second_fundamental_form(f, &e_a, &unit(n, b));
                let scale = 1.0 + f.inner().norm(&direct);
                worst = worst.max(f.inner().norm(&(direct - tangential - h)) / scale);
            }
        }
        Ok(worst)
    })?;
    Ok(CheckReport::threshold(GAUSS_SPLIT_ID, r.value, GAUSS_SPLIT).with_witness(r.witness))
}

/// Largest `|g(h(X,Y),V) − g(A_V X, Y)|` over tangent-basis `X, Y` and normal-basis `V`.
pub fn duality_residual(s: &SubmanifoldSpec, frame: &FrameData) -> Result<f64, GeomError> {
    let inner = frame.inner();
    let params = frame.tangent_basis_params();
    let mut worst = 0.0f64;
    for k in 0..frame.normal_basis.ncols() {
        let v_field = normal_basis_field(s, frame, k);
        let v = frame.normal_basis.column(k).into_owned();
        for xi in &params {
            let (a_v_x, _) = weingarten_operator(frame, v_field.as_ref(), xi)?;
            for (b, eta) in params.iter().enumerate() {
                let lhs = inner.dot(&second_fundamental_form(frame, xi, eta), &v);
                let rhs = inner.dot(&a_v_x, &frame.tangent_basis.column(b).into_owned());
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

pub fn duality_check(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<CheckReport, GeomError> {
    let frames = sample_frames(s, samples)?;
    let r = max_per_sample(&frames, |f| duality_residual(s, f))?;
    Ok(CheckReport::threshold(DUALITY_ID, r.value, DUALITY).with_witness(r.witness))
}

/// Largest `|h(e_a, e_b)|` over orthonormal tangent-basis pairs.
pub fn max_second_fundamental_form(frame: &FrameData) -> f64 {
    let params = frame.tangent_basis_params();
    let mut worst = 0.0f64;
    for (a, xi) in params.iter().enumerate() {
        for eta in &params[a..] {
            worst = worst.max(frame.inner().norm(&second_fundamental_form(frame, xi, eta)));
        }
    }
    worst
}

pub fn totally_geodesic_check(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<CheckReport, GeomError> {
    let frames = sample_frames(s, samples)?;
    let r = max_per_sample(&frames, |f| Ok(max_second_fundamental_form(f)))?;
    let report = CheckReport::threshold(TOTALLY_GEODESIC_ID, r.value, TOTALLY_GEODESIC).with_witness(r.witness);
    let detail = if report.status == Status::Pass {
        "totally geodesic"
    } else {
        "not totally geodesic"
    };
    Ok(report.with_detail(detail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{ExprField, Mu};

    fn kaehler() -> Arc<ManifoldSpec> {
        Arc::new(
            ManifoldSpec::from_sources(
                "k",
                Mu::Plus,
                &[&["1", "0", "0", "0"], &["0", "1", "0", "0"], &["0", "0", "1", "0"], &["0", "0", "0", "1"]],
                &[&["0", "-1", "0", "0"], &["1", "0", "0", "0"], &["0", "0", "0", "-1"], &["0", "0", "1", "0"]],
                &[(-1.0, 1.0); 4],
            )
            .unwrap(),
        )
    }

    fn graph() -> SubmanifoldSpec {
        SubmanifoldSpec::from_sources("graph", kaehler(), &["u1", "u2", "u1^2 - u2^2", "2*u1*u2"], &[(-1.0, 1.0); 2])
            .unwrap()
    }

    fn e(m: usize, k: usize) -> DVector<f64> {
        unit(m, k)
    }

    #[test]
    fn flat_slice_frames() {
        let s = SubmanifoldSpec::from_sources("flat", kaehler(), &["u1", "u2", "u3", "0"], &[(-1.0, 1.0); 3]).unwrap();
        let f = frames_at(&s, &[0.1, 0.2, 0.3]).unwrap();
        for a in 0..3 {
            assert!((f.tangent_basis.column(a).into_owned() - e(4, a)).norm() < 1e-15);
        }
        assert!((f.normal_basis.column(0).into_owned() - e(4, 3)).norm() < 1e-15);
        assert_eq!(induced_metric(&s, &[0.1, 0.2, 0.3]).unwrap(), DMatrix::identity(3, 3));
        let h = second_fundamental_form(&f, &e(3, 0), &e(3, 2));
        assert_eq!(h.norm(), 0.0);
    }

    #[test]
    fn graph_surface_at_origin() {
        let s = graph();
        let f = frames_at(&s, &[0.0, 0.0]).unwrap();
        assert!((f.normal_basis.column(0).into_owned() - e(4, 2)).norm() < 1e-15);
        assert!((f.normal_basis.column(1).into_owned() - e(4, 3)).norm() < 1e-15);
        let h11 = second_fundamental_form(&f, &e(2, 0), &e(2, 0));
        let h12 = second_fundamental_form(&f, &e(2, 0), &e(2, 1));
        assert!((h11 - DVector::from_vec(vec![0.0, 0.0, 2.0, 0.0])).norm() < 1e-14);
        assert!((h12 - DVector::from_vec(vec![0.0, 0.0, 0.0, 2.0])).norm() < 1e-14);
    }

    #[test]
    fn graph_surface_induced_metric_off_origin() {
        let g = induced_metric(&graph(), &[1.0, 0.0]).unwrap();
        assert!((g - DMatrix::from_diagonal(&DVector::from_vec(vec![5.0, 5.0]))).abs().max() < 1e-14);
    }

    #[test]
    fn degenerate_embedding_is_rejected() {
        let s = SubmanifoldSpec::from_sources("bad", kaehler(), &["u1", "u1", "0", "0"], &[(-1.0, 1.0); 2]).unwrap();
        assert!(matches!(frames_at(&s, &[0.2, 0.1]), Err(GeomError::RankDeficient { .. })));
    }

    #[test]
    fn weingarten_of_graph_normal() {
        let s = graph();
        let f = frames_at(&s, &[0.0, 0.0]).unwrap();
        let v = normal_basis_field(&s, &f, 0);
        let (a, nabla_perp) = weingarten_operator(&f, v.as_ref(), &e(2, 0)).unwrap();
        assert!((a - DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0])).norm() < 1e-8);
        assert!(nabla_perp.norm() < 1e-8);
    }

    #[test]
    fn tangent_vector_is_not_a_normal_field() {
        let s = graph();
        let f = frames_at(&s, &[0.0, 0.0]).unwrap();
        let field = ExprField::new(2, [1.0, 0.0, 0.0, 0.0].iter().map(|&c| Expression::constant(c, 2)).collect());
        assert!(matches!(
            weingarten_operator(&f, &field, &e(2, 0)),
            Err(GeomError::NotNormal { .. })
        ));
    }

    #[test]
    fn graph_surface_is_not_totally_geodesic_but_dual() {
        let s = graph();
        let samples = crate::sampling::sample_points(&s.domain, 8, 3);
        assert_eq!(totally_geodesic_check(&s, &samples).unwrap().status, Status::Fail);
        let d = duality_check(&s, &samples).unwrap();
        assert_eq!(d.status, Status::Pass, "{d:?}");
        assert_eq!(h_symmetry_check(&s, &samples).unwrap().status, Status::Pass);
        assert_eq!(gauss_split_check(&s, &samples).unwrap().status, Status::Pass);
    }
}
