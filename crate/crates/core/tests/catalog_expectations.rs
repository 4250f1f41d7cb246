//! Every built-in fixture, run through the full suite, against its expected table.

use affinor::catalog::{all_fixtures, get_fixture, list_fixtures, FixtureEntry};
use affinor::report::{CheckReport, Status};
use affinor::sampling::sample_points;
use affinor::semi_invariant::{classify_submanifold, rank_signature, split_samples};
use affinor::structure::{classify_structure, nondegeneracy};
use affinor::suite::{run_suite, SuiteOptions};
use affinor::tolerance::{COMPATIBILITY, PARALLEL};

fn reports(f: &FixtureEntry) -> Vec<CheckReport> {
    run_suite(&f.ambient, f.sub.as_ref(), &SuiteOptions::default())
}

fn status_of<'a>(reports: &'a [CheckReport], id: &str) -> &'a CheckReport {
    reports
        .iter()
        .find(|r| r.check_id == id)
        .unwrap_or_else(|| panic!("no report for {id}"))
}

#[test]
fn names_are_listed_in_a_fixed_order_and_resolve() {
    let names: Vec<&str> = list_fixtures().into_iter().map(|(n, _)| n).collect();
    assert_eq!(names.len(), 11);
    assert_eq!(names[0], "kaehler_r4");
    for n in &names {
        assert_eq!(get_fixture(n).unwrap().name, *n);
    }
    assert!(get_fixture("no_such_fixture").is_none());
}

#[test]
fn listed_statuses_match() {
    for f in all_fixtures() {
        let reports = reports(&f);
        for (id, want) in &f.expected.statuses {
            let r = status_of(&reports, id);
            assert_eq!(r.status, *want, "{}: {id} residual {:e} detail {}", f.name, r.max_residual, r.detail);
        }
    }
}

#[test]
fn no_fixture_reports_mismatch_or_rank_ambiguity() {
    for f in all_fixtures() {
        for r in reports(&f) {
            assert_ne!(r.status, Status::Mismatch, "{}: {}", f.name, r.check_id);
            assert_ne!(r.status, Status::RankAmbiguous, "{}: {}", f.name, r.check_id);
        }
    }
}

#[test]
fn every_fixture_is_compatible() {
    for f in all_fixtures() {
        let r = reports(&f);
        let c = status_of(&r, "compatibility");
        assert_eq!(c.status, Status::Pass, "{}", f.name);
        assert!(c.max_residual <= 1e-10, "{}: {:e}", f.name, c.max_residual);
    }
}

#[test]
fn ambient_verdicts_match() {
    for f in all_fixtures() {
        let samples = sample_points(&f.ambient.domain, 50, 24245);
        let nd = nondegeneracy(&f.ambient, &samples).unwrap();
        assert_eq!(nd.nondegenerate, f.expected.nondegenerate, "{}", f.name);
        assert_eq!(nd.kernel_dim, f.expected.kernel_dim, "{}", f.name);
        let v = classify_structure(&f.ambient, &samples, COMPATIBILITY, PARALLEL).unwrap();
        assert_eq!(v.parallel, f.expected.parallel, "{}", f.name);
        assert_eq!(v.family, f.expected.family, "{}", f.name);
    }
    assert_eq!(get_fixture("cosymplectic_r5").unwrap().expected.kernel_dim, 1);
}

#[test]
fn submanifold_classes_and_ranks_match() {
    for f in all_fixtures() {
        let Some(s) = &f.sub else {
            assert!(f.expected.class.is_none() && f.expected.ranks.is_none());
            continue;
        };
        let samples = sample_points(&s.domain, 50, 24245);
        let splits = split_samples(s, &samples).unwrap();
        assert_eq!(classify_submanifold(&splits), f.expected.class, "{}", f.name);
        let (p, q, _, dt) = rank_signature(&splits[0]);
        assert_eq!(Some((p, q, dt)), f.expected.ranks, "{}", f.name);
        for split in &splits {
            assert_eq!(rank_signature(split), rank_signature(&splits[0]), "{}", f.name);
        }
    }
}
