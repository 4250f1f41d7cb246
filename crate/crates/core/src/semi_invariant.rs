//! Semi-invariant splitting `TN = D ⊕ D⊥`, `T⊥N = F(D⊥) ⊕ D̃`, the
//! decomposition `F = φ + ω` on `TN`, and the checks built on them.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::chart::Mu;
use crate::error::GeomError;
use crate::linalg::{columns_to_matrix, numeric_rank, sorted_svd};
use crate::report::{CheckReport, Status};
use crate::sampling::{map_samples, Extremum};
use crate::submanifold::{frames_at, FrameData, SubmanifoldSpec};
use crate::tolerance::{
    AMBIGUOUS_HI, AMBIGUOUS_LO, LAGRANGIAN, PHI_OMEGA, PHI_ON_DPERP, PRINCIPAL_ANGLE, PROJECTOR, RANK_ABS,
    SEMI_INVARIANT,
};

pub const SPLIT_RANKS_ID: &str = "split_ranks";
pub const INVARIANT_PART_ID: &str = "invariant_part_invariance";
pub const ANTI_INVARIANT_PART_ID: &str = "anti_invariant_part";
pub const F2_DPERP_DISTRIBUTION_ID: &str = "f2_dperp_distribution";
pub const PROJECTORS_ID: &str = "projectors";
pub const PHI_OMEGA_ID: &str = "phi_omega_split";
pub const PHI_ANNIHILATES_ID: &str = "phi_annihilates_dperp";
pub const INDUCED_STRUCTURE_ID: &str = "induced_structure";
pub const F2_DPERP_IN_DPERP_ID: &str = "f2_dperp_in_dperp";
pub const DTILDE_INVARIANT_ID: &str = "dtilde_invariant";
pub const NONDEGENERATE_EQUALITIES_ID: &str = "nondegenerate_equalities";
pub const LAGRANGIAN_ID: &str = "lagrangian";
pub const CLASS_ID: &str = "submanifold_class";

/// The splitting at one point; all bases are g-orthonormal ambient columns.
#[derive(Debug, Clone)]
pub struct SplitData {
    pub frame: FrameData,
    pub basis_d: DMatrix<f64>,
    pub basis_dperp: DMatrix<f64>,
    pub basis_fdperp: DMatrix<f64>,
    pub basis_dtilde: DMatrix<f64>,
    pub p: usize,
    pub q: usize,
    /// Spectrum of `π_T ∘ F` on `TN`, descending.
    pub singular_values: Vec<f64>,
}

/// Orthogonal projectors onto `D` and `D⊥` in orthonormal tangent coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

impl ProjectorPair {
    /// Largest defect among `P+Q=I`, `P²=P`, `Q²=Q`, `PQ=0`.
    pub fn defect(&self) -> f64 {
        let n = self.p.nrows();
        let id = DMatrix::identity(n, n);
        [
            (&self.p + &self.q - id).abs().max(),
            (&self.p * &self.p - &self.p).abs().max(),
            (&self.q * &self.q - &self.q).abs().max(),
            (&self.p * &self.q).abs().max(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl SplitData {
    pub fn u(&self) -> &[f64] {
        &self.frame.u
    }

    pub fn dim_fdperp(&self) -> usize {
        self.basis_fdperp.ncols()
    }

    pub fn dim_dtilde(&self) -> usize {
        self.basis_dtilde.ncols()
    }

    pub fn affinor(&self) -> &DMatrix<f64> {
        &self.frame.geometry.affinor
    }

    fn project(&self, basis: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.frame.inner().project(basis, v)
    }

    pub fn project_d(&self, v: &DVector<f64>) -> DVector<f64> {
        self.project(&self.basis_d, v)
    }

    pub fn project_dperp(&self, v: &DVector<f64>) -> DVector<f64> {
        self.project(&self.basis_dperp, v)
    }

    pub fn project_fdperp(&self, v: &DVector<f64>) -> DVector<f64> {
        self.project(&self.basis_fdperp, v)
    }

    pub fn project_dtilde(&self, v: &DVector<f64>) -> DVector<f64> {
        self.project(&self.basis_dtilde, v)
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        self.frame.inner().norm(v)
    }

    pub fn projectors(&self) -> ProjectorPair {
        let inner = self.frame.inner();
        let t = self.frame.tangent_basis.transpose() * inner.gram();
        let cd = &t * &self.basis_d;
        let cq = &t * &self.basis_dperp;
        ProjectorPair {
            p: &cd * cd.transpose(),
            q: &cq * cq.transpose(),
        }
    }

    /// `(φX, ωX) = (F·PX, F·QX)` for an ambient tangent vector `X`.
    pub fn phi_omega(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let f = self.affinor();
        (f * self.project_d(x), f * self.project_dperp(x))
    }

    /// `φ` in parameter coordinates: `ξ ↦ coords(π_T F π_D Jξ)`.
    pub fn phi_param_matrix(&self) -> DMatrix<f64> {
        let n = self.frame.dim();
        let f = self.affinor();
        let mut out = DMatrix::zeros(n, n);
        for a in 0..n {
            let mut e = DVector::zeros(n);
            e[a] = 1.0;
            let image = f * self.project_d(&self.frame.push(&e));
            out.set_column(a, &self.frame.param_coords(&self.frame.tangential(&image)));
        }
        out
    }
}

/// Splitting at a frame. Without a declared frame of `D`, `D⊥` is the kernel of `π_T ∘ F` on `TN`.
pub fn split_tangent(s: &SubmanifoldSpec, frame: FrameData) -> Result<SplitData, GeomError> {
    let inner = frame.inner().clone();
    let t = &frame.tangent_basis;
    let f = &frame.geometry.affinor;
    let tf = t.transpose() * inner.gram() * f * t;
    let svd = sorted_svd(&tf);
    let sv = svd.singular_values.clone();

    let (basis_d, basis_dperp) = match s.frame_d_fields() {
        Some(fields) => {
            let columns = fields
                .iter()
                .map(|fld| Ok(frame.push(&fld.eval(&frame.u)?)))
                .collect::<Result<Vec<_>, GeomError>>()?;
            let d = inner.orthonormal_span(&columns_to_matrix(frame.ambient_dim(), &columns));
            let dperp = inner.complement_within(t, &d);
            (d, dperp)
        }
        None => {
            let smax = sv.first().copied().unwrap_or(0.0);
            if sv
                .iter()
                .any(|&x| x > RANK_ABS && x >= AMBIGUOUS_LO * smax && x <= AMBIGUOUS_HI * smax)
            {
                return Err(GeomError::RankAmbiguous {
                    point: frame.u.clone(),
                    singular_values: sv,
                });
            }
            let rank = numeric_rank(&sv);
            let n = t.ncols();
            let d = t * svd.v.columns(0, rank);
            let dperp = t * svd.v.columns(rank, n - rank);
            (d, dperp)
        }
    };

    let images: Vec<DVector<f64>> = (0..basis_dperp.ncols())
        .map(|k| frame.normal(&(f * basis_dperp.column(k))))
        .collect();
    let basis_fdperp = inner.orthonormal_span(&columns_to_matrix(frame.ambient_dim(), &images));
    let basis_dtilde = inner.complement_within(&frame.normal_basis, &basis_fdperp);
    Ok(SplitData {
        p: basis_d.ncols(),
        q: basis_dperp.ncols(),
        basis_d,
        basis_dperp,
        basis_fdperp,
        basis_dtilde,
        singular_values: sv,
        frame,
    })
}

pub fn split_at(s: &SubmanifoldSpec, u: &[f64]) -> Result<SplitData, GeomError> {
    split_tangent(s, frames_at(s, u)?)
}

/// Splittings at every sample, in sample order.
pub fn split_samples(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<Vec<SplitData>, GeomError> {
    if samples.is_empty() {
        return Err(GeomError::Dimension("no sample points".into()));
    }
    map_samples(samples, |u| split_at(s, u))
}

fn columns(m: &DMatrix<f64>) -> impl Iterator<Item = DVector<f64>> + '_ {
    (0..m.ncols()).map(move |k| m.column(k).into_owned())
}

fn max_over_splits<F>(splits: &[SplitData], f: F) -> Extremum
where
    F: Fn(&SplitData) -> f64,
{
    let mut best = Extremum::zero();
    for s in splits {
        best.offer(f(s), s.u());
    }
    best
}

/// Ranks `(p, q, dim F(D⊥), dim D̃)` at one sample.
pub fn rank_signature(s: &SplitData) -> (usize, usize, usize, usize) {
    (s.p, s.q, s.dim_fdperp(), s.dim_dtilde())
}

/// Samples whose rank signature differs from the first one.
pub fn rank_changes(splits: &[SplitData]) -> Extremum {
    let Some(first) = splits.first().map(rank_signature) else {
        return Extremum::zero();
    };
    let mut count = 0.0;
    let mut witness = None;
    for s in splits {
        if rank_signature(s) != first {
            count += 1.0;
            witness.get_or_insert_with(|| s.u().to_vec());
        }
    }
    Extremum { value: count, witness }
}

pub fn check_split_ranks(splits: &[SplitData], ambient_nondegenerate: bool) -> CheckReport {
    let changes = rank_changes(splits);
    let first = rank_signature(&splits[0]);
    let (p, q, fq, dt) = first;
    let n = splits[0].frame.dim();
    let mut detail = format!("p={p} q={q} dim F(Dperp)={fq} dim Dtilde={dt}");
    let counts_ok = p + q == n && (!ambient_nondegenerate || fq == q);
    let status = if changes.value > 0.0 {
        detail.push_str("; ranks vary across samples");
        Status::RankAmbiguous
    } else if counts_ok {
        Status::Pass
    } else {
        detail.push_str("; dimension count violated");
        Status::Fail
    };
    CheckReport::new(SPLIT_RANKS_ID, status, changes.value, 0.0)
        .with_witness(changes.witness)
        .with_detail(detail)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiInvariance {
    /// `|π_{D⊥⊕T⊥}(F d)|` over `d ∈ D`.
    pub invariant_part: Extremum,
    /// `|π_T(F z)|` over `z ∈ D⊥`.
    pub anti_invariant_part: Extremum,
    /// `|π_⊥(F² z)|` over `z ∈ D⊥`.
    pub f2_dperp_tangent: Extremum,
    /// Rank of `F²(D⊥)` at each sample.
    pub f2_dperp_ranks: Vec<usize>,
}

impl SemiInvariance {
    pub fn ranks_constant(&self) -> bool {
        self.f2_dperp_ranks.windows(2).all(|w| w[0] == w[1])
    }

    pub fn holds(&self) -> bool {
        self.invariant_part.value <= SEMI_INVARIANT
            && self.anti_invariant_part.value <= SEMI_INVARIANT
            && self.f2_dperp_tangent.value <= SEMI_INVARIANT
            && self.ranks_constant()
    }
}

pub fn semi_invariance(splits: &[SplitData]) -> SemiInvariance {
    let invariant_part = max_over_splits(splits, |s| {
        columns(&s.basis_d)
            .map(|d| {
                let fd = s.affinor() * d;
                s.norm(&(&fd - s.project_d(&fd)))
            })
            .fold(0.0, f64::max)
    });
    let anti_invariant_part = max_over_splits(splits, |s| {
        columns(&s.basis_dperp)
            .map(|z| s.norm(&s.frame.tangential(&(s.affinor() * z))))
            .fold(0.0, f64::max)
    });
    let f2_dperp_tangent = max_over_splits(splits, |s| {
        columns(&s.basis_dperp)
            .map(|z| s.norm(&s.frame.normal(&(s.affinor() * (s.affinor() * z)))))
            .fold(0.0, f64::max)
    });
    let f2_dperp_ranks = splits
        .iter()
        .map(|s| {
            let f2 = s.affinor() * s.affinor();
            s.frame.inner().orthonormal_span(&(f2 * &s.basis_dperp)).ncols()
        })
        .collect();
    SemiInvariance {
        invariant_part,
        anti_invariant_part,
        f2_dperp_tangent,
        f2_dperp_ranks,
    }
}

/// Reports for the three defining conditions of a semi-invariant submanifold.
pub fn verify_semi_invariance(splits: &[SplitData]) -> Vec<CheckReport> {
    let v = semi_invariance(splits);
    let mut f2 = CheckReport::threshold(F2_DPERP_DISTRIBUTION_ID, v.f2_dperp_tangent.value, SEMI_INVARIANT)
        .with_witness(v.f2_dperp_tangent.witness.clone());
    let ranks: Vec<usize> = {
        let mut r = v.f2_dperp_ranks.clone();
        r.dedup();
        r
    };
    if v.ranks_constant() {
        f2 = f2.with_detail(format!("rank of F^2(Dperp) = {} at every sample", ranks[0]));
    } else {
        f2 = f2.with_detail(format!("rank of F^2(Dperp) varies: {ranks:?}"));
        f2.status = Status::Fail;
    }
    vec![
        CheckReport::threshold(INVARIANT_PART_ID, v.invariant_part.value, SEMI_INVARIANT)
            .with_witness(v.invariant_part.witness),
        CheckReport::threshold(ANTI_INVARIANT_PART_ID, v.anti_invariant_part.value, SEMI_INVARIANT)
            .with_witness(v.anti_invariant_part.witness),
        f2,
    ]
}

pub fn check_projectors(splits: &[SplitData]) -> CheckReport {
    let r = max_over_splits(splits, |s| s.projectors().defect());
    CheckReport::threshold(PROJECTORS_ID, r.value, PROJECTOR).with_witness(r.witness)
}

/// `|FX − φX − ωX|` over tangent-basis `X`.
pub fn check_phi_omega(splits: &[SplitData]) -> CheckReport {
    let r = max_over_splits(splits, |s| {
        columns(&s.frame.tangent_basis)
            .map(|x| {
                let (phi, omega) = s.phi_omega(&x);
                s.norm(&(s.affinor() * &x - phi - omega))
            })
            .fold(0.0, f64::max)
    });
    CheckReport::threshold(PHI_OMEGA_ID, r.value, PHI_OMEGA).with_witness(r.witness)
}

pub fn check_phi_annihilates_dperp(splits: &[SplitData]) -> CheckReport {
    let r = max_over_splits(splits, |s| {
        columns(&s.basis_dperp)
            .map(|z| s.norm(&s.phi_omega(&z).0))
            .fold(0.0, f64::max)
    });
    CheckReport::threshold(PHI_ANNIHILATES_ID, r.value, PHI_ON_DPERP).with_witness(r.witness)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubmanifoldClass {
    Invariant,
    AntiInvariant,
    Proper,
    NormalProper,
    NormalAntiInvariant,
}

impl SubmanifoldClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SubmanifoldClass::Invariant => "invariant",
            SubmanifoldClass::AntiInvariant => "anti-invariant",
            SubmanifoldClass::Proper => "proper",
            SubmanifoldClass::NormalProper => "normal-proper",
            SubmanifoldClass::NormalAntiInvariant => "normal-anti-invariant",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            SubmanifoldClass::Invariant,
            SubmanifoldClass::AntiInvariant,
            SubmanifoldClass::Proper,
            SubmanifoldClass::NormalProper,
            SubmanifoldClass::NormalAntiInvariant,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

impl fmt::Display for SubmanifoldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Label from the ranks; `None` when the ranks vary across samples.
pub fn classify_submanifold(splits: &[SplitData]) -> Option<SubmanifoldClass> {
    if rank_changes(splits).value > 0.0 {
        return None;
    }
    let (p, q, _, dt) = rank_signature(splits.first()?);
    Some(match (p, q, dt) {
        (_, 0, _) => SubmanifoldClass::Invariant,
        (0, _, 0) => SubmanifoldClass::NormalAntiInvariant,
        (0, _, _) => SubmanifoldClass::AntiInvariant,
        (_, _, 0) => SubmanifoldClass::NormalProper,
        _ => SubmanifoldClass::Proper,
    })
}

pub fn check_class(splits: &[SplitData], semi_invariant: bool) -> CheckReport {
    let changes = rank_changes(splits);
    if !semi_invariant {
        return CheckReport::inapplicable(CLASS_ID, "semi-invariance failed");
    }
    match classify_submanifold(splits) {
        Some(c) => {
            let (p, q, _, dt) = rank_signature(&splits[0]);
            CheckReport::new(CLASS_ID, Status::Pass, 0.0, 0.0)
                .with_detail(format!("class={c} p={p} q={q} dim Dtilde={dt}"))
        }
        None => CheckReport::new(CLASS_ID, Status::RankAmbiguous, changes.value, 0.0)
            .with_witness(changes.witness)
            .with_detail("ranks vary across samples"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InducedStructure {
    /// `|g(φX,Y) + μ g(X,φY)|` over tangent-basis pairs.
    pub phi_compatibility: Extremum,
    /// `|π_{D⊕T⊥}(F² z)|` over `z ∈ D⊥`.
    pub f2_dperp_in_dperp: Extremum,
    /// `|π_{TN⊕F(D⊥)}(F w)|` over `w ∈ D̃`.
    pub dtilde_invariant: Extremum,
}

pub fn induced_structure(splits: &[SplitData], mu: Mu) -> InducedStructure {
    let phi_compatibility = max_over_splits(splits, |s| {
        let inner = s.frame.inner();
        let basis: Vec<DVector<f64>> = columns(&s.frame.tangent_basis).collect();
        let phis: Vec<DVector<f64>> = basis.iter().map(|x| s.phi_omega(x).0).collect();
        let mut worst = 0.0f64;
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let r = inner.dot(&phis[i], y) + mu.value() * inner.dot(x, &phis[j]);
                worst = worst.max(r.abs());
            }
        }
        worst
    });
    let f2_dperp_in_dperp = max_over_splits(splits, |s| {
        columns(&s.basis_dperp)
            .map(|z| {
                let v = s.affinor() * (s.affinor() * z);
                s.norm(&(&v - s.project_dperp(&v)))
            })
            .fold(0.0, f64::max)
    });
    let dtilde_invariant = max_over_splits(splits, |s| {
        columns(&s.basis_dtilde)
            .map(|w| {
                let v = s.affinor() * w;
                s.norm(&(&v - s.project_dtilde(&v)))
            })
            .fold(0.0, f64::max)
    });
    InducedStructure {
        phi_compatibility,
        f2_dperp_in_dperp,
        dtilde_invariant,
    }
}

pub fn verify_induced_structure(splits: &[SplitData], mu: Mu) -> Vec<CheckReport> {
    let v = induced_structure(splits, mu);
    vec![
        CheckReport::threshold(INDUCED_STRUCTURE_ID, v.phi_compatibility.value, SEMI_INVARIANT)
            .with_witness(v.phi_compatibility.witness)
            .with_detail(format!("phi is compatible with the induced metric for mu={mu}")),
        CheckReport::threshold(F2_DPERP_IN_DPERP_ID, v.f2_dperp_in_dperp.value, SEMI_INVARIANT)
            .with_witness(v.f2_dperp_in_dperp.witness),
        CheckReport::threshold(DTILDE_INVARIANT_ID, v.dtilde_invariant.value, SEMI_INVARIANT)
            .with_witness(v.dtilde_invariant.witness),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct NondegenerateEqualities {
    /// Largest principal angle among `F(D)` vs `D`, `F²(D⊥)` vs `D⊥`, `F(D̃)` vs `D̃`.
    pub max_angle: Extremum,
    /// `|Ω(X,Y)|` over pairs in `D⊥` and pairs in `F(D⊥)`; `None` for μ = −1.
    pub lagrangian: Option<Extremum>,
}

pub fn nondegenerate_equalities(splits: &[SplitData], mu: Mu) -> NondegenerateEqualities {
    let max_angle = max_over_splits(splits, |s| {
        let inner = s.frame.inner();
        let f = s.affinor();
        let f2 = f * f;
        let pairs = [
            (f * &s.basis_d, &s.basis_d),
            (f2 * &s.basis_dperp, &s.basis_dperp),
            (f * &s.basis_dtilde, &s.basis_dtilde),
        ];
        pairs
            .iter()
            .map(|(image, target)| inner.max_principal_angle(&inner.orthonormal_span(image), target))
            .fold(0.0, f64::max)
    });
    let lagrangian = (mu == Mu::Plus).then(|| {
        max_over_splits(splits, |s| {
            let inner = s.frame.inner();
            let f = s.affinor();
            let isotropy = |basis: &DMatrix<f64>| {
                let mut worst = 0.0f64;
                for x in columns(basis) {
                    for y in columns(basis) {
                        worst = worst.max(inner.dot(&(f * &x), &y).abs());
                    }
                }
                worst
            };
            isotropy(&s.basis_dperp).max(isotropy(&s.basis_fdperp))
        })
    });
    NondegenerateEqualities { max_angle, lagrangian }
}

pub fn verify_nondegenerate_equalities(splits: &[SplitData], mu: Mu, ambient_nondegenerate: bool) -> Vec<CheckReport> {
    if !ambient_nondegenerate {
        return vec![
            CheckReport::inapplicable(NONDEGENERATE_EQUALITIES_ID, "ambient nondegeneracy failed"),
            CheckReport::inapplicable(LAGRANGIAN_ID, "ambient nondegeneracy failed"),
        ];
    }
    let v = nondegenerate_equalities(splits, mu);
    let equalities = CheckReport::threshold(NONDEGENERATE_EQUALITIES_ID, v.max_angle.value, PRINCIPAL_ANGLE)
        .with_witness(v.max_angle.witness)
        .with_detail("max principal angle in radians");
    let lagrangian = match v.lagrangian {
        Some(l) => CheckReport::threshold(LAGRANGIAN_ID, l.value, LAGRANGIAN).with_witness(l.witness),
        None => CheckReport::inapplicable(LAGRANGIAN_ID, "requires mu=+1"),
    };
    vec![equalities, lagrangian]
}

/// Ambient images `f(u)` of parameter samples.
pub fn samples_in_ambient(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, GeomError> {
    samples
        .iter()
        .map(|u| Ok(s.embed(u)?.as_slice().to_vec()))
        .collect()
}
