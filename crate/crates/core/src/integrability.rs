//! Frobenius integrability of `D` and `D⊥`, Nijenhuis tensors of `φ`, and
//! the integrability and geodesy criteria for semi-invariant submanifolds.
//!
//! Sections of `D` and `D⊥` are manufactured by projecting coordinate
//! vector fields of `N` onto the target distribution, with the choice of
//! coordinates frozen at the point where derivatives are taken. Brackets
//! and covariant derivatives of these fields use central differences.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::chart::{central_difference_jacobian, lie_bracket, nijenhuis_of, AffinorField, FnAffinor, FnField, Mu, VectorField};
use crate::error::GeomError;
use crate::linalg::{columns_to_matrix, numeric_rank, sorted_svd};
use crate::report::{CheckReport, Status};
use crate::sampling::Extremum;
use crate::semi_invariant::{split_at, SplitData};
use crate::submanifold::{connection_from_jet, second_fundamental_form, shape_operator_from_jet, SubmanifoldSpec};
use crate::tolerance::{
    CHAIN_IDENTITY, FAILS, HOLDS, H_PHI_IDENTITY, NIJENHUIS_IDENTITY, PARALLEL, RANK_REL, WEINGARTEN_COMMUTATOR,
};

pub const D_INTEGRABILITY_ID: &str = "d_integrability";
pub const DPERP_INTEGRABILITY_ID: &str = "dperp_integrability";
pub const NIJENHUIS_IDENTITY_ID: &str = "nijenhuis_identity";
pub const WEINGARTEN_COMMUTATOR_ID: &str = "weingarten_commutator";
pub const DPERP_FOLIATION_ID: &str = "dperp_foliation";
pub const D_INTEGRABILITY_PARALLEL_ID: &str = "d_integrability_parallel";
pub const H_PHI_IDENTITY_ID: &str = "h_phi_identity";
pub const DPERP_GEODESIC_ID: &str = "dperp_totally_geodesic";
pub const CHAIN_IDENTITY_ID: &str = "chain_identity";
pub const D_GEODESIC_ID: &str = "d_totally_geodesic";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    D,
    Dperp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    UserDeclared,
    ProjectedConstant,
}

/// Smooth local sections spanning `D` or `D⊥`, in parameter coordinates.
pub struct FrameField {
    pub target: Target,
    pub provenance: Provenance,
    /// Parameter coordinates whose projections seed the fields (empty when user-declared).
    pub pivots: Vec<usize>,
    pub fields: Vec<Arc<dyn VectorField>>,
}

impl fmt::Debug for FrameField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrameField")
            .field("target", &self.target)
            .field("provenance", &self.provenance)
            .field("pivots", &self.pivots)
            .field("len", &self.fields.len())
            .finish()
    }
}

fn target_basis(split: &SplitData, target: Target) -> &DMatrix<f64> {
    match target {
        Target::D => &split.basis_d,
        Target::Dperp => &split.basis_dperp,
    }
}

fn project_target(split: &SplitData, target: Target, v: &DVector<f64>) -> DVector<f64> {
    match target {
        Target::D => split.project_d(v),
        Target::Dperp => split.project_dperp(v),
    }
}

fn unit(n: usize, a: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[a] = 1.0;
    e
}

/// Greedy choice of coordinate directions whose projections onto the target are most independent.
pub fn choose_pivots(split: &SplitData, target: Target) -> Vec<usize> {
    let k = target_basis(split, target).ncols();
    let n = split.frame.dim();
    let inner = split.frame.inner();
    let candidates: Vec<DVector<f64>> = (0..n)
        .map(|a| project_target(split, target, &split.frame.push(&unit(n, a))))
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for (a, c) in candidates.iter().enumerate() {
            if chosen.contains(&a) {
                continue;
            }
            let mut r = c.clone();
            for b in &basis {
                r -= b * inner.dot(b, &r);
            }
            let norm = inner.norm(&r);
            if best.as_ref().is_none_or(|(_, bn, _)| norm > *bn) {
                best = Some((a, norm, r));
            }
        }
        let Some((a, norm, r)) = best else { break };
        chosen.push(a);
        if norm > 0.0 {
            basis.push(r / norm);
        }
    }
    chosen
}

/// Frame vectors of `target` at the split's point, in parameter coordinates.
pub fn frame_vectors(
    s: &SubmanifoldSpec,
    split: &SplitData,
    target: Target,
    pivots: &[usize],
) -> Result<Vec<DVector<f64>>, GeomError> {
    if target == Target::D {
        if let Some(fields) = s.frame_d_fields() {
            return fields.iter().map(|f| f.eval(&split.frame.u)).collect();
        }
    }
    let n = split.frame.dim();
    Ok(pivots
        .iter()
        .map(|&a| {
            let v = project_target(split, target, &split.frame.push(&unit(n, a)));
            split.frame.param_coords(&v)
        })
        .collect())
}

/// Independence and membership of frame vectors at one point.
pub fn validate_frame(split: &SplitData, target: Target, vectors: &[DVector<f64>]) -> Result<(), GeomError> {
    if vectors.is_empty() {
        return Ok(());
    }
    let frame = &split.frame;
    let pushed: Vec<DVector<f64>> = vectors.iter().map(|v| frame.push(v)).collect();
    let whitened = frame.inner().whiten(&columns_to_matrix(frame.ambient_dim(), &pushed));
    let sv = sorted_svd(&whitened).singular_values;
    let ratio = sv.last().copied().unwrap_or(0.0) / sv[0].max(f64::MIN_POSITIVE);
    if numeric_rank(&sv) < vectors.len() || ratio < RANK_REL || vectors.len() != target_basis(split, target).ncols() {
        return Err(GeomError::FrameRankDrop {
            point: frame.u.clone(),
            ratio,
        });
    }
    let outside = pushed
        .iter()
        .map(|v| split.norm(&(v - project_target(split, target, v))) / split.norm(v).max(1.0))
        .fold(0.0, f64::max);
    if outside > 1e-8 {
        return Err(GeomError::FrameRankDrop {
            point: frame.u.clone(),
            ratio: outside,
        });
    }
    Ok(())
}

/// Frame of `target` with pivots frozen at `base`.
pub fn smooth_frame(s: &SubmanifoldSpec, target: Target, base: &[f64]) -> Result<FrameField, GeomError> {
    let split = split_at(s, base)?;
    if target == Target::D {
        if let Some(fields) = s.frame_d_fields() {
            return Ok(FrameField {
                target,
                provenance: Provenance::UserDeclared,
                pivots: Vec::new(),
                fields,
            });
        }
    }
    let pivots = choose_pivots(&split, target);
    validate_frame(&split, target, &frame_vectors(s, &split, target, &pivots)?)?;
    let n = s.dim;
    let fields = pivots
        .iter()
        .map(|&a| {
            let s = s.clone();
            Arc::new(FnField::new(n, n, move |u: &[f64]| {
                let sp = split_at(&s, u)?;
                Ok(frame_vectors(&s, &sp, target, &[a])?.remove(0))
            })) as Arc<dyn VectorField>
        })
        .collect();
    Ok(FrameField {
        target,
        provenance: Provenance::ProjectedConstant,
        pivots,
        fields,
    })
}

/// `φ` as a (1,1)-tensor field on the parameter domain.
pub fn phi_field(s: &SubmanifoldSpec) -> Arc<dyn AffinorField> {
    let s = s.clone();
    let n = s.dim;
    Arc::new(FnAffinor::new(n, move |u: &[f64]| Ok(split_at(&s, u)?.phi_param_matrix())))
}

/// `N_φ(X,Y)` in parameter coordinates, from the four-bracket formula.
pub fn nijenhuis_phi(
    s: &SubmanifoldSpec,
    x: &Arc<dyn VectorField>,
    y: &Arc<dyn VectorField>,
    u: &[f64],
) -> Result<DVector<f64>, GeomError> {
    nijenhuis_of(&phi_field(s), x, y, u)
}

/// Largest `|π_complement [X_i, X_j]|` over frame pairs `i < j` and samples.
pub fn frobenius_residual(
    s: &SubmanifoldSpec,
    frame: &FrameField,
    complement: Target,
    samples: &[Vec<f64>],
) -> Result<CheckReport, GeomError> {
    let values = samples
        .par_iter()
        .map(|u| {
            let split = split_at(s, u)?;
            let mut worst = 0.0f64;
            for i in 0..frame.fields.len() {
                for j in (i + 1)..frame.fields.len() {
                    let b = lie_bracket(frame.fields[i].as_ref(), frame.fields[j].as_ref(), u)?;
                    let pushed = split.frame.push(&b);
                    worst = worst.max(split.norm(&project_target(&split, complement, &pushed)));
                }
            }
            Ok(worst)
        })
        .collect::<Vec<Result<f64, GeomError>>>();
    let mut best = Extremum::zero();
    for (u, v) in samples.iter().zip(values) {
        best.offer(v?, u);
    }
    let state = ConditionState::from_residual(best.value);
    let status = match state {
        ConditionState::Holds => Status::Pass,
        ConditionState::Fails => Status::Fail,
        ConditionState::Indeterminate => Status::Indeterminate,
    };
    let id = match frame.target {
        Target::D => "frobenius_d",
        Target::Dperp => "frobenius_dperp",
    };
    Ok(CheckReport::new(id, status, best.value, HOLDS)
        .with_witness(best.witness)
        .with_detail(format!("{}", state)))
}

/// Value and Jacobian of several fields at one point.
#[derive(Debug, Clone)]
pub struct FieldJets {
    pub values: Vec<DVector<f64>>,
    pub jacobians: Vec<DMatrix<f64>>,
}

impl FieldJets {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `[A_i, B_j] = DB_j·A_i − DA_i·B_j`.
fn bracket(a: &FieldJets, i: usize, b: &FieldJets, j: usize) -> DVector<f64> {
    &b.jacobians[j] * &a.values[i] - &a.jacobians[i] * &b.values[j]
}

/// Everything the criteria need at one sample: the splitting, `φ`, and jets of
/// the frame fields of `D` and `D⊥`, of their images under `φ`, and of the
/// normal fields `F(Z)` for `Z` in the `D⊥` frame.
#[derive(Debug, Clone)]
pub struct LocalData {
    pub split: SplitData,
    pub phi: DMatrix<f64>,
    pub provenance: Provenance,
    pub x: FieldJets,
    pub phi_x: FieldJets,
    pub z: FieldJets,
    pub phi_z: FieldJets,
    pub fz: FieldJets,
}

impl LocalData {
    pub fn u(&self) -> &[f64] {
        self.split.u()
    }

    fn push(&self, v: &DVector<f64>) -> DVector<f64> {
        self.split.frame.push(v)
    }

    /// g-norm of the pushforward of a parameter vector.
    fn tnorm(&self, v: &DVector<f64>) -> f64 {
        self.split.norm(&self.push(v))
    }

    fn affinor(&self) -> &DMatrix<f64> {
        self.split.affinor()
    }

    fn dot(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.split.frame.inner().dot(a, b)
    }

    /// `N_φ(A_i, A_j)` for a family with jets of `A` and `φA`.
    fn nijenhuis(&self, a: &FieldJets, phi_a: &FieldJets, i: usize, j: usize) -> DVector<f64> {
        let phi = &self.phi;
        bracket(phi_a, i, phi_a, j) + phi * (phi * bracket(a, i, a, j))
            - phi * bracket(phi_a, i, a, j)
            - phi * bracket(a, i, phi_a, j)
    }

    fn h(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> DVector<f64> {
        second_fundamental_form(&self.split.frame, xi, eta)
    }

    /// `∇_Y W` for `Y` a parameter vector and `W` a member of a jet family.
    fn connection(&self, y: &DVector<f64>, w: &FieldJets, k: usize) -> DVector<f64> {
        connection_from_jet(&self.split.frame, y, &w.values[k], &w.jacobians[k])
    }

    /// `A_{F Z_k} Y`.
    fn shape(&self, k: usize, y: &DVector<f64>) -> DVector<f64> {
        shape_operator_from_jet(&self.split.frame, y, &self.fz.values[k], &self.fz.jacobians[k])
    }
}

/// Builds [`LocalData`] at `u` with frame pivots frozen at `u`.
pub fn local_data(s: &SubmanifoldSpec, u: &[f64]) -> Result<LocalData, GeomError> {
    let split = split_at(s, u)?;
    let d_pivots = choose_pivots(&split, Target::D);
    let z_pivots = choose_pivots(&split, Target::Dperp);
    validate_frame(&split, Target::D, &frame_vectors(s, &split, Target::D, &d_pivots)?)?;
    validate_frame(&split, Target::Dperp, &frame_vectors(s, &split, Target::Dperp, &z_pivots)?)?;
    let provenance = if s.frame_d.is_some() {
        Provenance::UserDeclared
    } else {
        Provenance::ProjectedConstant
    };

    let (n, m) = (s.dim, s.ambient.dim);
    let stack = |p: &[f64]| -> Result<Vec<DVector<f64>>, GeomError> {
        let sp = split_at(s, p)?;
        let phi = sp.phi_param_matrix();
        let xs = frame_vectors(s, &sp, Target::D, &d_pivots)?;
        let zs = frame_vectors(s, &sp, Target::Dperp, &z_pivots)?;
        let mut out = Vec::with_capacity(2 * xs.len() + 3 * zs.len());
        out.extend(xs.iter().cloned());
        out.extend(xs.iter().map(|x| &phi * x));
        out.extend(zs.iter().cloned());
        out.extend(zs.iter().map(|z| &phi * z));
        out.extend(zs.iter().map(|z| sp.affinor() * sp.frame.push(z)));
        Ok(out)
    };
    let values = stack(u)?;
    let sizes: Vec<usize> = values.iter().map(|v| v.len()).collect();
    let total: usize = sizes.iter().sum();
    let flat = |p: &[f64]| -> Result<DVector<f64>, GeomError> {
        let parts = stack(p)?;
        Ok(DVector::from_iterator(total, parts.iter().flat_map(|v| v.iter().copied())))
    };
    let jac = central_difference_jacobian(flat, u, total)?;
    let mut jacobians = Vec::with_capacity(values.len());
    let mut row = 0;
    for size in &sizes {
        jacobians.push(jac.rows(row, *size).into_owned());
        row += size;
    }

    let p = s.frame_d.as_ref().map_or(d_pivots.len(), |f| f.len());
    let q = z_pivots.len();
    let mut vals = values.into_iter();
    let mut jacs = jacobians.into_iter();
    let mut take = |k: usize| FieldJets {
        values: vals.by_ref().take(k).collect(),
        jacobians: jacs.by_ref().take(k).collect(),
    };
    let x = take(p);
    let phi_x = take(p);
    let z = take(q);
    let phi_z = take(q);
    let fz = take(q);
    debug_assert!(fz.values.iter().all(|v| v.len() == m) && x.values.iter().all(|v| v.len() == n));
    Ok(LocalData {
        phi: split.phi_param_matrix(),
        split,
        provenance,
        x,
        phi_x,
        z,
        phi_z,
        fz,
    })
}

pub fn local_data_at_samples(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<Vec<LocalData>, GeomError> {
    crate::sampling::map_samples(samples, |u| local_data(s, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionState {
    Holds,
    Fails,
    Indeterminate,
}

impl ConditionState {
    /// Holds at or below `1e-5`, fails at or above `1e-3`, no claim in between.
    pub fn from_residual(r: f64) -> Self {
        if r <= HOLDS {
            ConditionState::Holds
        } else if r >= FAILS {
            ConditionState::Fails
        } else {
            ConditionState::Indeterminate
        }
    }
}

impl fmt::Display for ConditionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionState::Holds => "holds",
            ConditionState::Fails => "fails",
            ConditionState::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub residual: f64,
    pub witness: Option<Vec<f64>>,
    pub state: ConditionState,
    /// True when the quantifier ranges over no frame vectors.
    pub vacuous: bool,
}

impl Condition {
    fn from_extremum(name: &'static str, e: Extremum, vacuous: bool) -> Self {
        Self {
            name,
            state: ConditionState::from_residual(e.value),
            residual: e.value,
            witness: e.witness,
            vacuous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    AllHold,
    NoneHold,
    Mismatch,
    Indeterminate,
    Inapplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::AllHold => "all-hold",
            Verdict::NoneHold => "none-hold",
            Verdict::Mismatch => "MISMATCH",
            Verdict::Indeterminate => "indeterminate",
            Verdict::Inapplicable => "inapplicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of comparing conditions that a theorem asserts to be equivalent.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceVerdict {
    pub check_id: &'static str,
    pub conditions: Vec<Condition>,
    pub verdict: Verdict,
    /// Failed hypothesis, if any (also set when a check is evaluated despite it).
    pub hypothesis: Option<String>,
}

impl EquivalenceVerdict {
    pub fn new(check_id: &'static str, conditions: Vec<Condition>, hypothesis: Option<String>) -> Self {
        let states: Vec<ConditionState> = conditions.iter().map(|c| c.state).collect();
        let verdict = if states.contains(&ConditionState::Indeterminate) {
            Verdict::Indeterminate
        } else if states.iter().all(|s| *s == ConditionState::Holds) {
            Verdict::AllHold
        } else if states.iter().all(|s| *s == ConditionState::Fails) {
            Verdict::NoneHold
        } else {
            Verdict::Mismatch
        };
        Self {
            check_id,
            conditions,
            verdict,
            hypothesis,
        }
    }

    pub fn inapplicable(check_id: &'static str, hypothesis: impl Into<String>) -> Self {
        Self {
            check_id,
            conditions: Vec::new(),
            verdict: Verdict::Inapplicable,
            hypothesis: Some(hypothesis.into()),
        }
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Residual is the number of conditions disagreeing with the first.
    pub fn to_report(&self) -> CheckReport {
        if self.verdict == Verdict::Inapplicable {
            return CheckReport::inapplicable(self.check_id, self.hypothesis.clone().unwrap_or_default());
        }
        let first = self.conditions.first().map(|c| c.state);
        let disagreements = self
            .conditions
            .iter()
            .filter(|c| Some(c.state) != first)
            .count() as f64;
        let status = match self.verdict {
            Verdict::AllHold | Verdict::NoneHold => Status::Pass,
            Verdict::Mismatch => Status::Mismatch,
            _ => Status::Indeterminate,
        };
        let mut detail = format!("verdict={}", self.verdict);
        for c in &self.conditions {
            detail.push_str(&format!(
                "; {}={:.3e} {}{}",
                c.name,
                c.residual,
                c.state,
                if c.vacuous { " (vacuous)" } else { "" }
            ));
        }
        if let Some(h) = &self.hypothesis {
            detail.push_str(&format!("; warning: {h}"));
        }
        let witness = self
            .conditions
            .iter()
            .find(|c| c.state != ConditionState::Holds)
            .and_then(|c| c.witness.clone());
        CheckReport::new(self.check_id, status, disagreements, 0.0)
            .with_witness(witness)
            .with_detail(detail)
    }
}

/// Ambient hypotheses the criteria depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypotheses {
    pub nondegenerate: bool,
    pub parallel: bool,
    pub mu: Mu,
}

impl Hypotheses {
    /// The first failed hypothesis among those requested.
    pub fn failed(&self, nondegenerate: bool, parallel: bool, mu_plus: bool) -> Option<String> {
        if nondegenerate && !self.nondegenerate {
            Some("nondegeneracy failed".into())
        } else if parallel && !self.parallel {
            Some("parallelism failed".into())
        } else if mu_plus && self.mu != Mu::Plus {
            Some("mu=+1 required".into())
        } else {
            None
        }
    }
}

/// Ambient nondegeneracy and parallelism at the ambient samples and at the image of the parameter samples.
pub fn hypotheses(
    s: &SubmanifoldSpec,
    ambient_samples: &[Vec<f64>],
    samples: &[Vec<f64>],
    parallel_tol: f64,
) -> Result<Hypotheses, GeomError> {
    let mut points = ambient_samples.to_vec();
    points.extend(crate::semi_invariant::samples_in_ambient(s, samples)?);
    let nd = crate::structure::nondegeneracy(&s.ambient, &points)?;
    let par = crate::structure::parallel_residual(&s.ambient, &points)?;
    Ok(Hypotheses {
        nondegenerate: nd.nondegenerate,
        parallel: par.value <= parallel_tol,
        mu: s.ambient.mu,
    })
}

impl Default for Hypotheses {
    fn default() -> Self {
        Self {
            nondegenerate: true,
            parallel: true,
            mu: Mu::Plus,
        }
    }
}

/// Default parallelism tolerance.
pub const PARALLEL_TOL: f64 = PARALLEL;

fn max_local<F>(data: &[LocalData], f: F) -> Extremum
where
    F: Fn(&LocalData) -> f64,
{
    let mut best = Extremum::zero();
    for d in data {
        best.offer(f(d), d.u());
    }
    best
}

fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| ((i + 1)..k).map(move |j| (i, j)))
}

fn all_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (0..k).map(move |j| (i, j)))
}

fn fold_max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn dims(data: &[LocalData]) -> (usize, usize) {
    data.first().map_or((0, 0), |d| (d.x.len(), d.z.len()))
}

/// `|π_{D⊥}[X_i, X_j]|` over `D`-frame pairs.
pub fn d_frobenius(data: &[LocalData]) -> Extremum {
    max_local(data, |d| {
        fold_max(pairs(d.x.len()).map(|(i, j)| {
            let b = d.push(&bracket(&d.x, i, &d.x, j));
            d.split.norm(&d.split.project_dperp(&b))
        }))
    })
}

/// `|π_D[Z_i, Z_j]|` over `D⊥`-frame pairs.
pub fn dperp_frobenius(data: &[LocalData]) -> Extremum {
    max_local(data, |d| {
        fold_max(pairs(d.z.len()).map(|(i, j)| {
            let b = d.push(&bracket(&d.z, i, &d.z, j));
            d.split.norm(&d.split.project_d(&b))
        }))
    })
}

/// Integrability of `D` against the vanishing of `Q∘N_φ` on `D` and the agreement of `N_F` with `N_φ` on `D`.
pub fn check_invariant_integrability(data: &[LocalData], hyp: &Hypotheses) -> EquivalenceVerdict {
    let (p, _) = dims(data);
    let vacuous = p < 2;
    let frobenius = d_frobenius(data);
    let q_nijenhuis = max_local(data, |d| {
        fold_max(pairs(d.x.len()).map(|(i, j)| {
            let n = d.push(&d.nijenhuis(&d.x, &d.phi_x, i, j));
            d.split.norm(&d.split.project_dperp(&n))
        }))
    });
    let agree = max_local(data, |d| {
        fold_max(pairs(d.x.len()).map(|(i, j)| {
            let nf = d
                .split
                .frame
                .geometry
                .nijenhuis(&d.push(&d.x.values[i]), &d.push(&d.x.values[j]));
            let nphi = d.push(&d.nijenhuis(&d.x, &d.phi_x, i, j));
            d.split.norm(&(nf - nphi))
        }))
    });
    EquivalenceVerdict::new(
        D_INTEGRABILITY_ID,
        vec![
            Condition::from_extremum("frobenius", frobenius, vacuous),
            Condition::from_extremum("q_nijenhuis", q_nijenhuis, vacuous),
            Condition::from_extremum("nijenhuis_agree", agree, vacuous),
        ],
        hyp.failed(true, false, false).map(|h| format!("{h} (evaluated anyway)")),
    )
}

/// Integrability of `D⊥` against the vanishing of `N_φ` on `D⊥`.
pub fn check_anti_invariant_integrability(data: &[LocalData], hyp: &Hypotheses) -> EquivalenceVerdict {
    if let Some(h) = hyp.failed(true, false, false) {
        return EquivalenceVerdict::inapplicable(DPERP_INTEGRABILITY_ID, h);
    }
    let (_, q) = dims(data);
    let nphi = max_local(data, |d| {
        fold_max(pairs(d.z.len()).map(|(i, j)| d.tnorm(&d.nijenhuis(&d.z, &d.phi_z, i, j))))
    });
    EquivalenceVerdict::new(
        DPERP_INTEGRABILITY_ID,
        vec![
            Condition::from_extremum("frobenius", dperp_frobenius(data), q < 2),
            Condition::from_extremum("nijenhuis", nphi, q < 2),
        ],
        None,
    )
}

/// `N_φ(Z,W) = F²P[Z,W]` on `D⊥`, evaluated along both sides.
pub fn nijenhuis_identity_check(data: &[LocalData]) -> CheckReport {
    let r = max_local(data, |d| {
        fold_max(pairs(d.z.len()).map(|(i, j)| {
            let lhs = d.push(&d.nijenhuis(&d.z, &d.phi_z, i, j));
            let f = d.affinor();
            let rhs = f * (f * d.split.project_d(&d.push(&bracket(&d.z, i, &d.z, j))));
            d.split.norm(&(lhs - rhs))
        }))
    });
    CheckReport::threshold(NIJENHUIS_IDENTITY_ID, r.value, NIJENHUIS_IDENTITY).with_witness(r.witness)
}

/// `A_{FZ}W − A_{FW}Z = φ[Z,W]` on `D⊥`.
pub fn check_weingarten_commutator(data: &[LocalData], hyp: &Hypotheses) -> CheckReport {
    if let Some(h) = hyp.failed(true, true, false) {
        return CheckReport::inapplicable(WEINGARTEN_COMMUTATOR_ID, h);
    }
    let r = max_local(data, |d| {
        fold_max((0..d.z.len()).flat_map(|i| (i..d.z.len()).map(move |j| (i, j))).map(|(i, j)| {
            let lhs = d.shape(i, &d.z.values[j]) - d.shape(j, &d.z.values[i]);
            let rhs = d.push(&(&d.phi * bracket(&d.z, i, &d.z, j)));
            d.split.norm(&(lhs - rhs))
        }))
    });
    CheckReport::threshold(WEINGARTEN_COMMUTATOR_ID, r.value, WEINGARTEN_COMMUTATOR).with_witness(r.witness)
}

/// Integrability of `D⊥` for parallel `F` with μ = +1; a violation contradicts the theorem.
pub fn check_anti_invariant_foliation(data: &[LocalData], hyp: &Hypotheses) -> CheckReport {
    if let Some(h) = hyp.failed(true, true, true) {
        return CheckReport::inapplicable(DPERP_FOLIATION_ID, h);
    }
    let r = dperp_frobenius(data);
    let status = match ConditionState::from_residual(r.value) {
        ConditionState::Holds => Status::Pass,
        ConditionState::Indeterminate => Status::Indeterminate,
        ConditionState::Fails => Status::Mismatch,
    };
    let detail = if status == Status::Mismatch {
        "Dperp not integrable although nondegeneracy, parallelism and mu=+1 hold"
    } else {
        "Dperp integrable"
    };
    CheckReport::new(DPERP_FOLIATION_ID, status, r.value, HOLDS)
        .with_witness(r.witness)
        .with_detail(detail)
}

/// `|g(h(X,φY) − h(Y,φX), FZ)|` over `D`-frame pairs and `D⊥`-frame `Z`.
fn h_phi_condition(d: &LocalData) -> f64 {
    let f = d.affinor();
    fold_max(pairs(d.x.len()).flat_map(|(i, j)| {
        let diff = d.h(&d.x.values[i], &d.phi_x.values[j]) - d.h(&d.x.values[j], &d.phi_x.values[i]);
        (0..d.z.len())
            .map(|k| d.dot(&diff, &(f * d.push(&d.z.values[k]))).abs())
            .collect::<Vec<_>>()
    }))
}

/// Integrability of `D` for parallel `F` against the `h`–`φ` commutator condition.
pub fn check_invariant_integrability_parallel(data: &[LocalData], hyp: &Hypotheses) -> EquivalenceVerdict {
    if let Some(h) = hyp.failed(true, true, false) {
        return EquivalenceVerdict::inapplicable(D_INTEGRABILITY_PARALLEL_ID, h);
    }
    let (p, q) = dims(data);
    EquivalenceVerdict::new(
        D_INTEGRABILITY_PARALLEL_ID,
        vec![
            Condition::from_extremum("frobenius", d_frobenius(data), p < 2),
            Condition::from_extremum("h_phi_condition", max_local(data, h_phi_condition), p < 2 || q == 0),
        ],
        None,
    )
}

/// `h(X,φY) − h(Y,φX) = ω([X,Y])` on `D`.
pub fn h_phi_identity_check(data: &[LocalData], hyp: &Hypotheses) -> CheckReport {
    if let Some(h) = hyp.failed(true, true, false) {
        return CheckReport::inapplicable(H_PHI_IDENTITY_ID, h);
    }
    let r = max_local(data, |d| {
        fold_max(pairs(d.x.len()).map(|(i, j)| {
            let lhs = d.h(&d.x.values[i], &d.phi_x.values[j]) - d.h(&d.x.values[j], &d.phi_x.values[i]);
            let b = d.push(&bracket(&d.x, i, &d.x, j));
            let rhs = d.affinor() * d.split.project_dperp(&b);
            d.split.norm(&(lhs - rhs))
        }))
    });
    CheckReport::threshold(H_PHI_IDENTITY_ID, r.value, H_PHI_IDENTITY).with_witness(r.witness)
}

/// Totally geodesic `D⊥` leaves, `h(D, D⊥) ⊂ D̃`, and `A_{F(D⊥)} D⊥ ⊂ D⊥`.
pub fn check_anti_invariant_totally_geodesic(data: &[LocalData], hyp: &Hypotheses) -> EquivalenceVerdict {
    if let Some(h) = hyp.failed(true, true, false) {
        return EquivalenceVerdict::inapplicable(DPERP_GEODESIC_ID, h);
    }
    if ConditionState::from_residual(dperp_frobenius(data).value) != ConditionState::Holds {
        return EquivalenceVerdict::inapplicable(DPERP_GEODESIC_ID, "Dperp integrability failed");
    }
    let (p, q) = dims(data);
    let leaves = max_local(data, |d| {
        fold_max(all_pairs(d.z.len()).map(|(i, j)| {
            let v = d.connection(&d.z.values[i], &d.z, j);
            d.split.norm(&d.split.project_d(&v))
        }))
    });
    let mixed = max_local(data, |d| {
        fold_max(all_pairs_between(d.x.len(), d.z.len()).map(|(i, j)| {
            let h = d.h(&d.x.values[i], &d.z.values[j]);
            d.split.norm(&d.split.project_fdperp(&h))
        }))
    });
    let weingarten = max_local(data, |d| {
        fold_max(all_pairs(d.z.len()).map(|(k, j)| {
            let a = d.shape(k, &d.z.values[j]);
            d.split.norm(&d.split.project_d(&a))
        }))
    });
    EquivalenceVerdict::new(
        DPERP_GEODESIC_ID,
        vec![
            Condition::from_extremum("connection", leaves, q == 0),
            Condition::from_extremum("h_mixed", mixed, p == 0 || q == 0),
            Condition::from_extremum("weingarten", weingarten, q == 0),
        ],
        None,
    )
}

fn all_pairs_between(a: usize, b: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..a).flat_map(move |i| (0..b).map(move |j| (i, j)))
}

/// `g(∇_Y Z, FX) = μ g(h(X,Y), FZ)` for `X ∈ D`, `Y, Z ∈ D⊥`.
pub fn chain_identity_check(data: &[LocalData], hyp: &Hypotheses) -> CheckReport {
    if let Some(h) = hyp.failed(true, true, false) {
        return CheckReport::inapplicable(CHAIN_IDENTITY_ID, h);
    }
    let mu = hyp.mu.value();
    let r = max_local(data, |d| {
        let f = d.affinor();
        let mut worst = 0.0f64;
        for i in 0..d.x.len() {
            let x = &d.x.values[i];
            let fx = f * d.push(x);
            for (a, b) in all_pairs(d.z.len()) {
                let y = &d.z.values[a];
                let lhs = d.dot(&d.connection(y, &d.z, b), &fx);
                let rhs = mu * d.dot(&d.h(x, y), &(f * d.push(&d.z.values[b])));
                worst = worst.max((lhs - rhs).abs());
            }
        }
        worst
    });
    CheckReport::threshold(CHAIN_IDENTITY_ID, r.value, CHAIN_IDENTITY).with_witness(r.witness)
}

/// Totally geodesic `D` leaves against `h(D, D) ⊂ D̃`.
pub fn check_invariant_totally_geodesic(data: &[LocalData], hyp: &Hypotheses) -> EquivalenceVerdict {
    if let Some(h) = hyp.failed(true, true, false) {
        return EquivalenceVerdict::inapplicable(D_GEODESIC_ID, h);
    }
    let (p, q) = dims(data);
    let frobenius = d_frobenius(data);
    let parallel_leaves = max_local(data, |d| {
        fold_max(all_pairs(d.x.len()).map(|(i, j)| {
            let v = d.connection(&d.x.values[i], &d.x, j);
            d.split.norm(&d.split.project_dperp(&v))
        }))
    });
    let left = if frobenius.value >= parallel_leaves.value {
        frobenius
    } else {
        parallel_leaves
    };
    let right = max_local(data, |d| {
        fold_max(all_pairs(d.x.len()).map(|(i, j)| {
            let h = d.h(&d.x.values[i], &d.x.values[j]);
            d.split.norm(&d.split.project_fdperp(&h))
        }))
    });
    EquivalenceVerdict::new(
        D_GEODESIC_ID,
        vec![
            Condition::from_extremum("totally_geodesic_leaves", left, p == 0),
            Condition::from_extremum("h_in_dtilde", right, p == 0 || q == 0),
        ],
        None,
    )
}
