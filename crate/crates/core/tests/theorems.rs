//! Integrability and geodesy checks against closed-form geometry.

use nalgebra::DVector;

use affinor::catalog::{all_fixtures, get_fixture};
use affinor::integrability::{
    check_invariant_integrability, d_frobenius, ConditionState, hypotheses, local_data_at_samples, smooth_frame, Target, Verdict,
    PARALLEL_TOL,
};
use affinor::report::{CheckReport, Status};
use affinor::sampling::sample_points;
use affinor::semi_invariant::split_samples;
use affinor::submanifold::SubmanifoldSpec;
use affinor::suite::{run_suite, SuiteOptions, THEOREM_IDS};

fn fixture_sub(name: &str) -> SubmanifoldSpec {
    get_fixture(name).unwrap().sub.unwrap()
}

fn suite(name: &str) -> Vec<CheckReport> {
    let f = get_fixture(name).unwrap();
    run_suite(&f.ambient, f.sub.as_ref(), &SuiteOptions::default())
}

fn report<'a>(reports: &'a [CheckReport], id: &str) -> &'a CheckReport {
    reports.iter().find(|r| r.check_id == id).unwrap()
}

/// Angle between the lines spanned by `a` and `b` in the flat metric.
fn line_angle(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a.dot(b).abs() / (a.norm() * b.norm())).min(1.0).acos()
}

#[test]
fn sphere_anti_invariant_line_is_the_hopf_direction() {
    let s = fixture_sub("s3_in_c2");
    let samples = sample_points(&s.domain, 50, 24245);
    for split in split_samples(&s, &samples).unwrap() {
        let x = &split.frame.x;
        let jx = DVector::from_vec(vec![-x[1], x[0], -x[3], x[2]]);
        assert_eq!(split.basis_dperp.ncols(), 1);
        let angle = line_angle(&split.basis_dperp.column(0).into_owned(), &jx);
        assert!(angle <= 1e-6, "angle {angle} at {:?}", split.frame.u);
        // F(D⊥) is the radial normal.
        let angle = line_angle(&split.basis_fdperp.column(0).into_owned(), x);
        assert!(angle <= 1e-6, "angle {angle} at {:?}", split.frame.u);
    }
}

#[test]
fn sphere_invariant_distribution_is_not_integrable_anywhere() {
    let s = fixture_sub("s3_in_c2");
    let samples = sample_points(&s.domain, 50, 24245);
    let data = local_data_at_samples(&s, &samples).unwrap();
    for d in data.chunks(1) {
        let r = d_frobenius(d);
        assert_eq!(ConditionState::from_residual(r.value), ConditionState::Fails, "at {:?}", d[0].u());
    }
    assert!(d_frobenius(&data).value >= 1e-1);
    let hyp = hypotheses(&s, &sample_points(&s.ambient.domain, 50, 24245), &samples, PARALLEL_TOL).unwrap();
    let v = check_invariant_integrability(&data, &hyp);
    assert_eq!(v.verdict, Verdict::NoneHold);
    let q = v.condition("q_nijenhuis").unwrap();
    assert!(q.residual >= 1e-2);
    assert!(q.witness.is_some());
}

#[test]
fn flat_hyperplane_splits_along_coordinate_axes() {
    let s = fixture_sub("flat_cr_r3_in_c2");
    let samples = sample_points(&s.domain, 20, 24245);
    let e = |i: usize| DVector::from_fn(4, |k, _| if k == i { 1.0 } else { 0.0 });
    for split in split_samples(&s, &samples).unwrap() {
        assert_eq!((split.p, split.q), (2, 1));
        for c in split.basis_d.column_iter() {
            assert!(c[2].abs() <= 1e-10 && c[3].abs() <= 1e-10);
        }
        assert!(line_angle(&split.basis_dperp.column(0).into_owned(), &e(2)) <= 1e-10);
        assert!(line_angle(&split.basis_fdperp.column(0).into_owned(), &e(3)) <= 1e-10);
        assert_eq!(split.basis_dtilde.ncols(), 0);
    }
}

#[test]
fn smooth_frames_span_the_pointwise_distributions() {
    let s = fixture_sub("s3_in_c2");
    let base = vec![1.0, 1.2, 2.0];
    let frame = smooth_frame(&s, Target::D, &base).unwrap();
    assert_eq!(frame.fields.len(), 2);
    let frame = smooth_frame(&s, Target::Dperp, &base).unwrap();
    assert_eq!(frame.fields.len(), 1);
}

#[test]
fn flat_hyperplane_satisfies_every_theorem() {
    let reports = suite("flat_cr_r3_in_c2");
    for id in THEOREM_IDS {
        assert_eq!(report(&reports, id).status, Status::Pass, "{id}");
    }
}

#[test]
fn sphere_verdicts_disagree_nowhere() {
    let reports = suite("s3_in_c2");
    let d = report(&reports, "d_integrability");
    assert_eq!(d.status, Status::Pass);
    assert!(d.detail.contains("none-hold"), "{}", d.detail);
    assert!(report(&reports, "dperp_integrability").detail.contains("all-hold"));
}

#[test]
fn degenerate_ambient_gates_nondegenerate_theorems() {
    let reports = suite("contact_slice_r5");
    for id in ["dperp_integrability", "weingarten_commutator", "dperp_foliation", "lagrangian"] {
        let r = report(&reports, id);
        assert_eq!(r.status, Status::Inapplicable, "{id}");
        assert!(r.detail.contains("nondegeneracy"), "{id}: {}", r.detail);
    }
    let d = report(&reports, "d_integrability");
    assert!(d.detail.contains("evaluated anyway"), "{}", d.detail);
}

#[test]
fn nonparallel_ambient_gates_parallel_theorems() {
    let reports = suite("nonparallel_r4");
    assert_eq!(report(&reports, "parallel_affinor").status, Status::Fail);
    for id in [
        "weingarten_commutator",
        "dperp_foliation",
        "d_integrability_parallel",
        "h_phi_identity",
        "dperp_totally_geodesic",
        "chain_identity",
        "d_totally_geodesic",
    ] {
        let r = report(&reports, id);
        assert_eq!(r.status, Status::Inapplicable, "{id}");
        assert_eq!(r.detail, "parallelism failed", "{id}");
    }
}

#[test]
fn self_adjoint_ambient_gates_skew_theorems() {
    let reports = suite("product_tilted_plane");
    let r = report(&reports, "dperp_foliation");
    assert_eq!(r.status, Status::Inapplicable);
    assert!(r.detail.contains("mu=+1"));
}

#[test]
fn verdicts_never_mismatch_across_the_catalog() {
    for f in all_fixtures() {
        for r in run_suite(&f.ambient, f.sub.as_ref(), &SuiteOptions::default()) {
            if THEOREM_IDS.contains(&r.check_id.as_str()) {
                assert_ne!(r.status, Status::Mismatch, "{}: {} {}", f.name, r.check_id, r.detail);
            }
        }
    }
}
