//! Runs every check on an ambient spec and an optional submanifold, in a fixed order.

use std::sync::Arc;

use crate::chart::ManifoldSpec;
use crate::error::GeomError;
use crate::integrability::{self as integ, Hypotheses, LocalData};
use crate::report::{CheckReport, ReportOptions, Status};
use crate::sampling::{sample_points, DEFAULT_POINTS, DEFAULT_SEED};
use crate::semi_invariant::{self as semi, SplitData};
use crate::structure;
use crate::submanifold::{self as subm, SubmanifoldSpec};
use crate::tolerance::{COMPATIBILITY, PARALLEL};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub points: usize,
    pub seed: u64,
    /// Overrides the compatibility and parallelism thresholds.
    pub tol: Option<f64>,
    /// Check ids to keep, or prefixes ending in `*`; empty keeps everything.
    pub checks: Vec<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            tol: None,
            checks: Vec::new(),
        }
    }
}

impl SuiteOptions {
    pub fn report_options(&self) -> ReportOptions {
        ReportOptions {
            points: self.points,
            seed: self.seed,
            tol: self.tol,
            checks: self.checks.clone(),
        }
    }

    pub fn selects(&self, id: &str) -> bool {
        self.checks.is_empty()
            || self
                .checks
                .iter()
                .any(|c| c.strip_suffix('*').map_or(id == c, |prefix| id.starts_with(prefix)))
    }
}

/// Report for a check whose computation failed.
pub fn error_report(id: &str, err: &GeomError) -> CheckReport {
    let status = match err {
        GeomError::RankAmbiguous { .. } => Status::RankAmbiguous,
        _ => Status::Fail,
    };
    let witness = match err {
        GeomError::AsymmetricMetric { point, .. }
        | GeomError::NotPositiveDefinite { point, .. }
        | GeomError::RankDeficient { point, .. }
        | GeomError::NormalPivotLost { point, .. }
        | GeomError::RankAmbiguous { point, .. }
        | GeomError::NotNormal { point, .. }
        | GeomError::FrameRankDrop { point, .. } => Some(point.clone()),
        _ => None,
    };
    CheckReport::new(id, status, f64::INFINITY, 0.0)
        .with_witness(witness)
        .with_detail(err.to_string())
}

fn one(id: &str, r: Result<CheckReport, GeomError>) -> CheckReport {
    r.unwrap_or_else(|e| error_report(id, &e))
}

fn all_failed(ids: &[&str], err: &GeomError) -> Vec<CheckReport> {
    ids.iter().map(|id| error_report(id, err)).collect()
}

fn all_inapplicable(ids: &[&str], why: &str) -> Vec<CheckReport> {
    ids.iter().map(|id| CheckReport::inapplicable(id, why)).collect()
}

const SEMI_IDS: [&str; 13] = [
    semi::SPLIT_RANKS_ID,
    semi::INVARIANT_PART_ID,
    semi::ANTI_INVARIANT_PART_ID,
    semi::F2_DPERP_DISTRIBUTION_ID,
    semi::PROJECTORS_ID,
    semi::PHI_OMEGA_ID,
    semi::PHI_ANNIHILATES_ID,
    semi::INDUCED_STRUCTURE_ID,
    semi::F2_DPERP_IN_DPERP_ID,
    semi::DTILDE_INVARIANT_ID,
    semi::NONDEGENERATE_EQUALITIES_ID,
    semi::LAGRANGIAN_ID,
    semi::CLASS_ID,
];

pub const THEOREM_IDS: [&str; 10] = [
    integ::D_INTEGRABILITY_ID,
    integ::DPERP_INTEGRABILITY_ID,
    integ::NIJENHUIS_IDENTITY_ID,
    integ::WEINGARTEN_COMMUTATOR_ID,
    integ::DPERP_FOLIATION_ID,
    integ::D_INTEGRABILITY_PARALLEL_ID,
    integ::H_PHI_IDENTITY_ID,
    integ::DPERP_GEODESIC_ID,
    integ::CHAIN_IDENTITY_ID,
    integ::D_GEODESIC_ID,
];

/// Every check id the suite can emit, in report order.
pub fn known_check_ids() -> Vec<&'static str> {
    let mut ids = vec![
        structure::COMPATIBILITY_ID,
        structure::NONDEGENERACY_ID,
        structure::FUNDAMENTAL_FORM_ID,
        structure::PARALLEL_ID,
        structure::FAMILY_ID,
        subm::FRAMES_ID,
        subm::H_SYMMETRY_ID,
        subm::GAUSS_SPLIT_ID,
        subm::DUALITY_ID,
        subm::TOTALLY_GEODESIC_ID,
    ];
    ids.extend(SEMI_IDS);
    ids.extend(THEOREM_IDS);
    ids
}

/// Filter entries that select no known check.
pub fn unknown_filters(checks: &[String]) -> Vec<String> {
    let ids = known_check_ids();
    checks
        .iter()
        .filter(|c| {
            let probe = SuiteOptions {
                checks: vec![(*c).clone()],
                ..SuiteOptions::default()
            };
            !ids.iter().any(|id| probe.selects(id))
        })
        .cloned()
        .collect()
}

/// Structure checks on the ambient samples.
pub fn structure_reports(m: &ManifoldSpec, samples: &[Vec<f64>], options: &SuiteOptions) -> Vec<CheckReport> {
    let compat_tol = options.tol.unwrap_or(COMPATIBILITY);
    let parallel_tol = options.tol.unwrap_or(PARALLEL);
    let family = match structure::classify_structure(m, samples, compat_tol, parallel_tol) {
        Ok(v) => structure::check_family(&v),
        Err(e) => error_report(structure::FAMILY_ID, &e),
    };
    vec![
        one(structure::COMPATIBILITY_ID, structure::check_compatibility(m, samples, compat_tol)),
        one(structure::NONDEGENERACY_ID, structure::check_nondegeneracy(m, samples)),
        one(structure::FUNDAMENTAL_FORM_ID, structure::check_fundamental_form(m, samples)),
        one(structure::PARALLEL_ID, structure::check_parallel(m, samples, parallel_tol)),
        family,
    ]
}

fn geometry_reports(s: &SubmanifoldSpec, samples: &[Vec<f64>]) -> Vec<CheckReport> {
    vec![
        one(subm::FRAMES_ID, subm::frames_check(s, samples)),
        one(subm::H_SYMMETRY_ID, subm::h_symmetry_check(s, samples)),
        one(subm::GAUSS_SPLIT_ID, subm::gauss_split_check(s, samples)),
        one(subm::DUALITY_ID, subm::duality_check(s, samples)),
        one(subm::TOTALLY_GEODESIC_ID, subm::totally_geodesic_check(s, samples)),
    ]
}

fn semi_invariant_reports(splits: &[SplitData], hyp: &Hypotheses) -> (Vec<CheckReport>, bool) {
    let mut out = vec![semi::check_split_ranks(splits, hyp.nondegenerate)];
    let si = semi::semi_invariance(splits);
    let holds = si.holds() && si.ranks_constant() && semi::rank_changes(splits).value == 0.0;
    out.extend(semi::verify_semi_invariance(splits));
    if holds {
        out.push(semi::check_projectors(splits));
        out.push(semi::check_phi_omega(splits));
        out.push(semi::check_phi_annihilates_dperp(splits));
        out.extend(semi::verify_induced_structure(splits, hyp.mu));
        out.extend(semi::verify_nondegenerate_equalities(splits, hyp.mu, hyp.nondegenerate));
    } else {
        out.extend(all_inapplicable(&SEMI_IDS[4..12], "semi-invariance failed"));
    }
    out.push(semi::check_class(splits, holds));
    (out, holds)
}

/// Integrability and geodesy reports, gated on the ambient hypotheses.
pub fn theorem_reports(data: &[LocalData], hyp: &Hypotheses) -> Vec<CheckReport> {
    vec![
        integ::check_invariant_integrability(data, hyp).to_report(),
        integ::check_anti_invariant_integrability(data, hyp).to_report(),
        integ::nijenhuis_identity_check(data),
        integ::check_weingarten_commutator(data, hyp),
        integ::check_anti_invariant_foliation(data, hyp),
        integ::check_invariant_integrability_parallel(data, hyp).to_report(),
        integ::h_phi_identity_check(data, hyp),
        integ::check_anti_invariant_totally_geodesic(data, hyp).to_report(),
        integ::chain_identity_check(data, hyp),
        integ::check_invariant_totally_geodesic(data, hyp).to_report(),
    ]
}

fn submanifold_reports(
    s: &SubmanifoldSpec,
    ambient_samples: &[Vec<f64>],
    options: &SuiteOptions,
) -> Vec<CheckReport> {
    let samples = sample_points(&s.domain, options.points, options.seed);
    let mut out = geometry_reports(s, &samples);
    let parallel_tol = options.tol.unwrap_or(PARALLEL);
    let hyp = match integ::hypotheses(s, ambient_samples, &samples, parallel_tol) {
        Ok(h) => h,
        Err(e) => {
            out.extend(all_failed(&SEMI_IDS, &e));
            out.extend(all_failed(&THEOREM_IDS, &e));
            return out;
        }
    };
    let holds = match semi::split_samples(s, &samples) {
        Ok(splits) => {
            let (reports, holds) = semi_invariant_reports(&splits, &hyp);
            out.extend(reports);
            holds
        }
        Err(e) => {
            out.extend(all_failed(&SEMI_IDS, &e));
            out.extend(all_failed(&THEOREM_IDS, &e));
            return out;
        }
    };
    if !holds {
        out.extend(all_inapplicable(&THEOREM_IDS, "semi-invariance failed"));
        return out;
    }
    match integ::local_data_at_samples(s, &samples) {
        Ok(data) => out.extend(theorem_reports(&data, &hyp)),
        Err(e) => out.extend(all_failed(&THEOREM_IDS, &e)),
    }
    out
}

/// Every check in report order; errors become per-check reports.
pub fn run_suite(ambient: &Arc<ManifoldSpec>, sub: Option<&SubmanifoldSpec>, options: &SuiteOptions) -> Vec<CheckReport> {
    let ambient_samples = sample_points(&ambient.domain, options.points, options.seed);
    let mut reports = structure_reports(ambient, &ambient_samples, options);
    if let Some(s) = sub {
        reports.extend(submanifold_reports(s, &ambient_samples, options));
    }
    reports.retain(|r| options.selects(&r.check_id));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_matches_exact_ids_and_starred_prefixes() {
        let o = SuiteOptions {
            checks: vec!["d_*".into(), "lagrangian".into(), "split".into()],
            ..SuiteOptions::default()
        };
        assert!(o.selects("d_integrability"));
        assert!(o.selects("lagrangian"));
        assert!(!o.selects("dperp_integrability"));
        assert!(!o.selects("split_ranks"));
        assert!(SuiteOptions::default().selects("anything"));
    }

    #[test]
    fn unknown_filters_are_reported() {
        let bad = unknown_filters(&["frames".into(), "thm_9*".into(), "compat".into()]);
        assert_eq!(bad, vec!["thm_9*".to_string(), "compat".to_string()]);
        let ids = known_check_ids();
        assert_eq!(ids.len(), 33);
        let unique: std::collections::HashSet<_> = ids.iter().collect();
        assert_eq!(unique.len(), ids.len());
    }

    #[test]
    fn errors_become_reports() {
        let e = GeomError::RankAmbiguous {
            point: vec![0.5],
            singular_values: vec![1.0, 1e-8],
        };
        let r = error_report("split_ranks", &e);
        assert_eq!(r.status, Status::RankAmbiguous);
        assert_eq!(r.witness, Some(vec![0.5]));
        let r = error_report("frames", &GeomError::Dimension("bad".into()));
        assert_eq!(r.status, Status::Fail);
    }
}
