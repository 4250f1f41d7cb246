//! Checks and classification of `(g, F, μ)` structures.

use std::fmt;

use nalgebra::DMatrix;

use crate::chart::{ManifoldSpec, Mu};
use crate::error::GeomError;
use crate::linalg::{numeric_rank, sorted_svd, spectral_norm};
use crate::report::{CheckReport, Status};
use crate::sampling::{map_samples, max_over, Extremum};
use crate::tolerance::{FAMILY, OMEGA_SKEW, RANK_REL};

pub const COMPATIBILITY_ID: &str = "compatibility";
pub const NONDEGENERACY_ID: &str = "nondegeneracy";
pub const FUNDAMENTAL_FORM_ID: &str = "fundamental_form";
pub const PARALLEL_ID: &str = "parallel_affinor";
pub const FAMILY_ID: &str = "structure_family";

/// Largest condition number of `F` accepted as nondegenerate.
pub const CONDITION_LIMIT: f64 = 1.0 / RANK_REL;

fn require_samples(samples: &[Vec<f64>]) -> Result<(), GeomError> {
    if samples.is_empty() {
        Err(GeomError::Dimension("no sample points".into()))
    } else {
        Ok(())
    }
}

/// `|GF + μFᵀG|` (spectral norm) at one point.
pub fn compatibility_residual(m: &ManifoldSpec, x: &[f64]) -> Result<f64, GeomError> {
    let g = m.metric_at(x)?;
    let f = m.affinor_at(x)?;
    Ok(spectral_norm(&(&g * &f + f.transpose() * &g * m.mu.value())))
}

/// `|G⁻¹FᵀG + μF|`: distance of the g-adjoint of `F` from `−μF`.
pub fn adjoint_residual(m: &ManifoldSpec, x: &[f64]) -> Result<f64, GeomError> {
    let g = m.metric_at(x)?;
    let f = m.affinor_at(x)?;
    let g_inv = g.clone().try_inverse().ok_or_else(|| GeomError::NotPositiveDefinite {
        point: x.to_vec(),
        min_eigenvalue: 0.0,
    })?;
    Ok(spectral_norm(&(g_inv * f.transpose() * g + f * m.mu.value())))
}

pub fn check_compatibility(m: &ManifoldSpec, samples: &[Vec<f64>], tol: f64) -> Result<CheckReport, GeomError> {
    require_samples(samples)?;
    let compat = max_over(samples, |x| compatibility_residual(m, x))?;
    let adjoint = max_over(samples, |x| adjoint_residual(m, x))?;
    Ok(CheckReport::threshold(COMPATIBILITY_ID, compat.value, tol)
        .with_witness(compat.witness)
        .with_detail(format!("mu={} adjoint_residual={:.3e}", m.mu, adjoint.value)))
}

/// Singular values of `F(x)`, descending.
pub fn affinor_singular_values(m: &ManifoldSpec, x: &[f64]) -> Result<Vec<f64>, GeomError> {
    Ok(sorted_svd(&m.affinor_at(x)?).singular_values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nondegeneracy {
    pub nondegenerate: bool,
    /// Smallest singular value of `F` over the samples.
    pub min_singular_value: f64,
    /// Largest pointwise kernel dimension; zero when nondegenerate.
    pub kernel_dim: usize,
    pub max_condition: f64,
    pub witness: Option<Vec<f64>>,
}

pub fn nondegeneracy(m: &ManifoldSpec, samples: &[Vec<f64>]) -> Result<Nondegeneracy, GeomError> {
    require_samples(samples)?;
    let spectra = map_samples(samples, |x| affinor_singular_values(m, x))?;
    let mut min_sv = f64::INFINITY;
    let mut kernel_dim = 0;
    let mut cond = Extremum::zero();
    for (x, sv) in samples.iter().zip(&spectra) {
        let smin = *sv.last().unwrap_or(&0.0);
        let smax = *sv.first().unwrap_or(&0.0);
        min_sv = min_sv.min(smin);
        kernel_dim = kernel_dim.max(sv.len() - numeric_rank(sv));
        let c = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        cond.offer(c, x);
    }
    Ok(Nondegeneracy {
        nondegenerate: kernel_dim == 0,
        min_singular_value: min_sv,
        kernel_dim,
        max_condition: cond.value,
        witness: cond.witness,
    })
}

pub fn check_nondegeneracy(m: &ManifoldSpec, samples: &[Vec<f64>]) -> Result<CheckReport, GeomError> {
    let v = nondegeneracy(m, samples)?;
    let status = if v.nondegenerate { Status::Pass } else { Status::Fail };
    let detail = if v.nondegenerate {
        format!("nondegenerate; min sigma={:.6e}", v.min_singular_value)
    } else {
        format!("degenerate; kernel dim {}; min sigma={:.6e}", v.kernel_dim, v.min_singular_value)
    };
    Ok(CheckReport::new(NONDEGENERACY_ID, status, v.max_condition, CONDITION_LIMIT)
        .with_witness(v.witness)
        .with_detail(detail))
}

/// `Ω_ij = g(Fe_i, e_j)`, i.e. `Ω = FᵀG`.
pub fn fundamental_form(m: &ManifoldSpec, x: &[f64]) -> Result<DMatrix<f64>, GeomError> {
    let g = m.metric_at(x)?;
    let f = m.affinor_at(x)?;
    Ok(f.transpose() * g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalFormVerdict {
    pub max_skew_residual: f64,
    pub skew_witness: Option<Vec<f64>>,
    /// Rank of Ω at each sample, in sample order.
    pub omega_ranks: Vec<usize>,
    pub omega_nondegenerate: bool,
    pub affinor_nondegenerate: bool,
    pub dimension_even: bool,
}

impl FundamentalFormVerdict {
    /// Ω nondegenerate everywhere exactly when F is, and then the dimension is even.
    pub fn consistent(&self) -> bool {
        self.omega_nondegenerate == self.affinor_nondegenerate && (!self.omega_nondegenerate || self.dimension_even)
    }
}

/// `None` when μ = −1.
pub fn fundamental_form_verdict(
    m: &ManifoldSpec,
    samples: &[Vec<f64>],
) -> Result<Option<FundamentalFormVerdict>, GeomError> {
    require_samples(samples)?;
    if m.mu != Mu::Plus {
        return Ok(None);
    }
    let per_point = map_samples(samples, |x| {
        let omega = fundamental_form(m, x)?;
        let skew = (&omega + omega.transpose()).abs().max();
        let rank = numeric_rank(&sorted_svd(&omega).singular_values);
        Ok((skew, rank))
    })?;
    let mut skew = Extremum::zero();
    for (x, (s, _)) in samples.iter().zip(&per_point) {
        skew.offer(*s, x);
    }
    let omega_ranks: Vec<usize> = per_point.iter().map(|(_, r)| *r).collect();
    Ok(Some(FundamentalFormVerdict {
        max_skew_residual: skew.value,
        skew_witness: skew.witness,
        omega_nondegenerate: omega_ranks.iter().all(|&r| r == m.dim),
        omega_ranks,
        affinor_nondegenerate: nondegeneracy(m, samples)?.nondegenerate,
        dimension_even: m.dim % 2 == 0,
    }))
}

pub fn check_fundamental_form(m: &ManifoldSpec, samples: &[Vec<f64>]) -> Result<CheckReport, GeomError> {
    let Some(v) = fundamental_form_verdict(m, samples)? else {
        return Ok(CheckReport::inapplicable(FUNDAMENTAL_FORM_ID, "requires mu=+1"));
    };
    let min_rank = v.omega_ranks.iter().copied().min().unwrap_or(0);
    let status = if v.max_skew_residual <= OMEGA_SKEW && v.consistent() {
        Status::Pass
    } else {
        Status::Fail
    };
    let detail = format!(
        "omega {} (min rank {min_rank}), affinor {}{}; equivalence {}",
        if v.omega_nondegenerate { "nondegenerate" } else { "degenerate" },
        if v.affinor_nondegenerate { "nondegenerate" } else { "degenerate" },
        if v.omega_nondegenerate { format!(", dimension {} even", m.dim) } else { String::new() },
        if v.consistent() { "consistent" } else { "violated" }
    );
    Ok(CheckReport::new(FUNDAMENTAL_FORM_ID, status, v.max_skew_residual, OMEGA_SKEW)
        .with_witness(v.skew_witness)
        .with_detail(detail))
}

/// Largest component `|(∇̃F)^i_{jk}|` over the samples.
pub fn parallel_residual(m: &ManifoldSpec, samples: &[Vec<f64>]) -> Result<Extremum, GeomError> {
    max_over(samples, |x| Ok(m.nabla_affinor(x)?.max_abs()))
}

pub fn check_parallel(m: &ManifoldSpec, samples: &[Vec<f64>], tol: f64) -> Result<CheckReport, GeomError> {
    require_samples(samples)?;
    let r = parallel_residual(m, samples)?;
    let detail = if r.value <= tol { "parallel" } else { "not parallel" };
    Ok(CheckReport::threshold(PARALLEL_ID, r.value, tol)
        .with_witness(r.witness)
        .with_detail(detail))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    AlmostHermitianLike,
    AlmostProductLike,
    ContactLikeDegenerate,
    Generic,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::AlmostHermitianLike => "almost-Hermitian-like",
            Family::AlmostProductLike => "almost-product-like",
            Family::ContactLikeDegenerate => "contact-like-degenerate",
            Family::Generic => "generic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureVerdict {
    pub compatible: bool,
    pub compatibility_residual: f64,
    pub nondegenerate: bool,
    pub min_singular_value: f64,
    pub kernel_dim: Option<usize>,
    pub parallel: bool,
    pub parallel_residual: f64,
    pub family: Family,
    /// Residual of the defining polynomial identity of `family`.
    pub family_residual: f64,
    /// `None` when μ = −1.
    pub fundamental_form_ok: Option<bool>,
}

fn max_entry(a: &DMatrix<f64>) -> f64 {
    a.abs().max()
}

/// Largest `|F² + I|`, `|F² − I|` and `|F³ + F|` over the samples.
fn family_residuals(m: &ManifoldSpec, samples: &[Vec<f64>]) -> Result<[f64; 3], GeomError> {
    let per_point = map_samples(samples, |x| {
        let f = m.affinor_at(x)?;
        let id = DMatrix::identity(m.dim, m.dim);
        let f2 = &f * &f;
        Ok([max_entry(&(&f2 + &id)), max_entry(&(&f2 - &id)), max_entry(&(&f2 * &f + &f))])
    })?;
    let mut out = [0.0f64; 3];
    for r in per_point {
        for k in 0..3 {
            out[k] = out[k].max(r[k]);
        }
    }
    Ok(out)
}

pub fn classify_structure(
    m: &ManifoldSpec,
    samples: &[Vec<f64>],
    compatibility_tol: f64,
    parallel_tol: f64,
) -> Result<StructureVerdict, GeomError> {
    require_samples(samples)?;
    let compat = max_over(samples, |x| compatibility_residual(m, x))?;
    let nd = nondegeneracy(m, samples)?;
    let par = parallel_residual(m, samples)?;
    let [hermitian, product, contact] = family_residuals(m, samples)?;
    let (family, family_residual) = match m.mu {
        Mu::Plus if hermitian <= FAMILY => (Family::AlmostHermitianLike, hermitian),
        Mu::Minus if product <= FAMILY => (Family::AlmostProductLike, product),
        Mu::Plus if nd.kernel_dim == 1 && contact <= FAMILY => (Family::ContactLikeDegenerate, contact),
        Mu::Plus => (Family::Generic, hermitian.min(contact)),
        Mu::Minus => (Family::Generic, product),
    };
    let fundamental_form_ok = fundamental_form_verdict(m, samples)?
        .map(|v| v.max_skew_residual <= OMEGA_SKEW && v.consistent());
    Ok(StructureVerdict {
        compatible: compat.value <= compatibility_tol,
        compatibility_residual: compat.value,
        nondegenerate: nd.nondegenerate,
        min_singular_value: nd.min_singular_value,
        kernel_dim: (!nd.nondegenerate).then_some(nd.kernel_dim),
        parallel: par.value <= parallel_tol,
        parallel_residual: par.value,
        family,
        family_residual,
        fundamental_form_ok,
    })
}

pub fn check_family(v: &StructureVerdict) -> CheckReport {
    if !v.compatible {
        return CheckReport::inapplicable(FAMILY_ID, "compatibility failed");
    }
    match v.family {
        Family::Generic => CheckReport::new(FAMILY_ID, Status::Inapplicable, v.family_residual, FAMILY)
            .with_detail("no family hypothesis holds; family=generic"),
        fam => CheckReport::threshold(FAMILY_ID, v.family_residual, FAMILY).with_detail(format!("family={fam}")),
    }
}
