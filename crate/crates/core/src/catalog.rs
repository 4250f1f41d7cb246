//! Built-in fixture manifolds and submanifolds with their expected outcomes.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::chart::{ManifoldSpec, Mu};
use crate::report::Status;
use crate::semi_invariant::SubmanifoldClass;
use crate::structure::Family;
use crate::submanifold::SubmanifoldSpec;

/// Expected outcomes of running the full suite on a fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub nondegenerate: bool,
    pub kernel_dim: usize,
    pub parallel: bool,
    pub family: Family,
    pub class: Option<SubmanifoldClass>,
    /// `(p, q, dim D̃)`.
    pub ranks: Option<(usize, usize, usize)>,
    /// Exact statuses for the listed checks; unlisted checks are unconstrained
    /// beyond never reporting MISMATCH.
    pub statuses: Vec<(&'static str, Status)>,
}

#[derive(Debug, Clone)]
pub struct FixtureEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub ambient: Arc<ManifoldSpec>,
    pub sub: Option<SubmanifoldSpec>,
    pub expected: Expected,
}

const NAMES: [(&str, &str); 11] = [
    ("kaehler_r4", "R^4 with the flat metric and the standard complex structure, mu=+1"),
    ("product_r3", "R^3 with the flat metric and F = diag(1,1,-1), mu=-1"),
    ("cosymplectic_r5", "R^5 with F = J + 0, a degenerate parallel structure, mu=+1"),
    ("flat_cr_r3_in_c2", "the hyperplane x4 = 0 in kaehler_r4"),
    ("totally_real_plane", "the plane spanned by e1 and e3 in kaehler_r4"),
    ("complex_curve", "the graph of z^2 in kaehler_r4"),
    ("s3_in_c2", "the unit 3-sphere in kaehler_r4 in spherical coordinates"),
    ("clifford_torus", "the flat torus with unit radii in kaehler_r4, a Lagrangian surface"),
    ("contact_slice_r5", "the slice x4 = x5 = 0 in cosymplectic_r5"),
    ("nonparallel_r4", "R^4 with a rotation-scaled complex structure depending on x1, and its x4 = 0 slice"),
    ("product_tilted_plane", "the plane x3 = x1 in product_r3"),
];

/// Fixture names with one-line descriptions, in a fixed order.
pub fn list_fixtures() -> Vec<(&'static str, &'static str)> {
    NAMES.to_vec()
}

fn identity(n: usize) -> Vec<Vec<String>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { "1" } else { "0" }.to_string()).collect())
        .collect()
}

fn rows(m: &[Vec<String>]) -> Vec<Vec<&str>> {
    m.iter().map(|r| r.iter().map(String::as_str).collect()).collect()
}

fn manifold(name: &str, mu: Mu, metric: Vec<Vec<String>>, affinor: Vec<Vec<String>>) -> Arc<ManifoldSpec> {
    let n = metric.len();
    let g = rows(&metric);
    let f = rows(&affinor);
    let g: Vec<&[&str]> = g.iter().map(Vec::as_slice).collect();
    let f: Vec<&[&str]> = f.iter().map(Vec::as_slice).collect();
    Arc::new(ManifoldSpec::from_sources(name, mu, &g, &f, &vec![(-1.0, 1.0); n]).expect("fixture manifolds parse"))
}

fn matrix(src: &[&[&str]]) -> Vec<Vec<String>> {
    src.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
}

fn kaehler_r4() -> Arc<ManifoldSpec> {
    manifold(
        "kaehler_r4",
        Mu::Plus,
        identity(4),
        matrix(&[&["0", "-1", "0", "0"], &["1", "0", "0", "0"], &["0", "0", "0", "-1"], &["0", "0", "1", "0"]]),
    )
}

fn product_r3() -> Arc<ManifoldSpec> {
    manifold(
        "product_r3",
        Mu::Minus,
        identity(3),
        matrix(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "-1"]]),
    )
}

fn cosymplectic_r5() -> Arc<ManifoldSpec> {
    manifold(
        "cosymplectic_r5",
        Mu::Plus,
        identity(5),
        matrix(&[
            &["0", "-1", "0", "0", "0"],
            &["1", "0", "0", "0", "0"],
            &["0", "0", "0", "-1", "0"],
            &["0", "0", "1", "0", "0"],
            &["0", "0", "0", "0", "0"],
        ]),
    )
}

fn nonparallel_r4() -> Arc<ManifoldSpec> {
    manifold(
        "nonparallel_r4",
        Mu::Plus,
        identity(4),
        matrix(&[
            &["0", "-(1 + 0.1*x1)", "0", "0"],
            &["1 + 0.1*x1", "0", "0", "0"],
            &["0", "0", "0", "-1"],
            &["0", "0", "1", "0"],
        ]),
    )
}

fn sub(name: &str, ambient: Arc<ManifoldSpec>, embedding: &[&str], domain: &[(f64, f64)]) -> SubmanifoldSpec {
    SubmanifoldSpec::from_sources(name, ambient, embedding, domain).expect("fixture submanifolds parse")
}

use Status::{Inapplicable, Pass};

/// Checks that need a parallel affinor.
const PARALLEL_CHECKS: [&str; 8] = [
    "weingarten_commutator",
    "dperp_foliation",
    "d_integrability_parallel",
    "h_phi_identity",
    "dperp_totally_geodesic",
    "chain_identity",
    "d_totally_geodesic",
    "parallel_affinor",
];

fn ambient_expected(name: &str) -> Expected {
    let (nondegenerate, kernel_dim, parallel, family) = match name {
        "kaehler_r4" => (true, 0, true, Family::AlmostHermitianLike),
        "product_r3" => (true, 0, true, Family::AlmostProductLike),
        "cosymplectic_r5" => (false, 1, true, Family::ContactLikeDegenerate),
        "nonparallel_r4" => (true, 0, false, Family::Generic),
        _ => unreachable!("not an ambient fixture"),
    };
    let mut statuses = vec![("compatibility", Pass)];
    statuses.push(("nondegeneracy", if nondegenerate { Pass } else { Status::Fail }));
    statuses.push(("parallel_affinor", if parallel { Pass } else { Status::Fail }));
    statuses.push((
        "fundamental_form",
        if name == "product_r3" { Inapplicable } else { Pass },
    ));
    statuses.push(("structure_family", if family == Family::Generic { Inapplicable } else { Pass }));
    Expected {
        nondegenerate,
        kernel_dim,
        parallel,
        family,
        class: None,
        ranks: None,
        statuses,
    }
}

fn with_sub(
    base: Expected,
    class: SubmanifoldClass,
    ranks: (usize, usize, usize),
    statuses: &[(&'static str, Status)],
) -> Expected {
    let mut e = base;
    e.class = Some(class);
    e.ranks = Some(ranks);
    e.statuses.extend_from_slice(statuses);
    e
}

/// Fully materialized fixture; `None` for unknown names.
pub fn get_fixture(name: &str) -> Option<FixtureEntry> {
    let (name, description) = NAMES.iter().copied().find(|(n, _)| *n == name)?;
    let square = |k: usize| vec![(-1.0, 1.0); k];
    let (ambient, sub, expected) = match name {
        "kaehler_r4" | "product_r3" | "cosymplectic_r5" => {
            let m = match name {
                "kaehler_r4" => kaehler_r4(),
                "product_r3" => product_r3(),
                _ => cosymplectic_r5(),
            };
            (m, None, ambient_expected(name))
        }
        "flat_cr_r3_in_c2" => {
            let m = kaehler_r4();
            let s = sub(name, m.clone(), &["u1", "u2", "u3", "0"], &square(3));
            let e = with_sub(
                ambient_expected("kaehler_r4"),
                SubmanifoldClass::NormalProper,
                (2, 1, 0),
                &[
                    ("totally_geodesic", Pass),
                    ("d_integrability", Pass),
                    ("dperp_integrability", Pass),
                    ("nijenhuis_identity", Pass),
                    ("weingarten_commutator", Pass),
                    ("dperp_foliation", Pass),
                    ("d_integrability_parallel", Pass),
                    ("h_phi_identity", Pass),
                    ("dperp_totally_geodesic", Pass),
                    ("chain_identity", Pass),
                    ("d_totally_geodesic", Pass),
                    ("nondegenerate_equalities", Pass),
                    ("lagrangian", Pass),
                ],
            );
            (m, Some(s), e)
        }
        "totally_real_plane" => {
            let m = kaehler_r4();
            let s = sub(name, m.clone(), &["u1", "0", "u2", "0"], &square(2));
            let e = with_sub(
                ambient_expected("kaehler_r4"),
                SubmanifoldClass::NormalAntiInvariant,
                (0, 2, 0),
                &[
                    ("totally_geodesic", Pass),
                    ("dperp_integrability", Pass),
                    ("weingarten_commutator", Pass),
                    ("dperp_foliation", Pass),
                    ("dperp_totally_geodesic", Pass),
                    ("nondegenerate_equalities", Pass),
                    ("lagrangian", Pass),
                ],
            );
            (m, Some(s), e)
        }
        "complex_curve" => {
            let m = kaehler_r4();
            let s = sub(name, m.clone(), &["u1", "u2", "u1^2 - u2^2", "2*u1*u2"], &square(2));
            let e = with_sub(
                ambient_expected("kaehler_r4"),
                SubmanifoldClass::Invariant,
                (2, 0, 2),
                &[
                    ("totally_geodesic", Status::Fail),
                    ("d_integrability", Pass),
                    ("d_totally_geodesic", Pass),
                ],
            );
            (m, Some(s), e)
        }
        "s3_in_c2" => {
            let m = kaehler_r4();
            let s = sub(
                name,
                m.clone(),
                &[
                    "cos(u1)",
                    "sin(u1)*cos(u2)",
                    "sin(u1)*sin(u2)*cos(u3)",
                    "sin(u1)*sin(u2)*sin(u3)",
                ],
                &[(0.3, PI - 0.3), (0.3, PI - 0.3), (0.3, 2.0 * PI - 0.3)],
            );
            let e = with_sub(
                ambient_expected("kaehler_r4"),
                SubmanifoldClass::NormalProper,
                (2, 1, 0),
                &[
                    ("totally_geodesic", Status::Fail),
                    ("d_integrability", Pass),
                    ("dperp_integrability", Pass),
                    ("nijenhuis_identity", Pass),
                    ("weingarten_commutator", Pass),
                    ("dperp_foliation", Pass),
                    ("d_integrability_parallel", Pass),
                    ("h_phi_identity", Pass),
                    ("chain_identity", Pass),
                    ("d_totally_geodesic", Pass),
                ],
            );
            (m, Some(s), e)
        }
        "clifford_torus" => {
            let m = kaehler_r4();
            let s = sub(
                name,
                m.clone(),
                &["cos(u1)", "sin(u1)", "cos(u2)", "sin(u2)"],
                &[(0.3, 2.0 * PI - 0.3), (0.3, 2.0 * PI - 0.3)],
            );
            let e = with_sub(
                ambient_expected("kaehler_r4"),
                SubmanifoldClass::NormalAntiInvariant,
                (0, 2, 0),
                &[
                    ("totally_geodesic", Status::Fail),
                    ("dperp_integrability", Pass),
                    ("nijenhuis_identity", Pass),
                    ("weingarten_commutator", Pass),
                    ("dperp_foliation", Pass),
                    ("dperp_totally_geodesic", Pass),
                    ("chain_identity", Pass),
                    ("nondegenerate_equalities", Pass),
                    ("lagrangian", Pass),
                ],
            );
            (m, Some(s), e)
        }
        "contact_slice_r5" => {
            let m = cosymplectic_r5();
            let s = sub(name, m.clone(), &["u1", "u2", "u3", "0", "0"], &square(3));
            let e = with_sub(
                ambient_expected("cosymplectic_r5"),
                SubmanifoldClass::Proper,
                (2, 1, 1),
                &[
                    ("totally_geodesic", Pass),
                    ("d_integrability", Pass),
                    ("dperp_integrability", Inapplicable),
                    ("nijenhuis_identity", Pass),
                    ("weingarten_commutator", Inapplicable),
                    ("dperp_foliation", Inapplicable),
                    ("nondegenerate_equalities", Inapplicable),
                    ("lagrangian", Inapplicable),
                ],
            );
            (m, Some(s), e)
        }
        "nonparallel_r4" => {
            let m = nonparallel_r4();
            let s = sub(name, m.clone(), &["u1", "u2", "u3", "0"], &square(3));
            let statuses: Vec<(&'static str, Status)> = PARALLEL_CHECKS
                .iter()
                .filter(|c| **c != "parallel_affinor")
                .map(|c| (*c, Inapplicable))
                .collect();
            let e = with_sub(ambient_expected("nonparallel_r4"), SubmanifoldClass::NormalProper, (2, 1, 0), &statuses);
            (m, Some(s), e)
        }
        "product_tilted_plane" => {
            let m = product_r3();
            let s = sub(name, m.clone(), &["u1", "u2", "u1"], &square(2));
            let e = with_sub(
                ambient_expected("product_r3"),
                SubmanifoldClass::NormalProper,
                (1, 1, 0),
                &[
                    ("totally_geodesic", Pass),
                    ("d_integrability", Pass),
                    ("dperp_integrability", Pass),
                    ("weingarten_commutator", Pass),
                    ("dperp_foliation", Inapplicable),
                    ("d_integrability_parallel", Pass),
                    ("dperp_totally_geodesic", Pass),
                    ("chain_identity", Pass),
                    ("d_totally_geodesic", Pass),
                    ("lagrangian", Inapplicable),
                ],
            );
            (m, Some(s), e)
        }
        _ => unreachable!("every listed name has a definition"),
    };
    Some(FixtureEntry {
        name,
        description,
        ambient,
        sub,
        expected,
    })
}

pub fn all_fixtures() -> Vec<FixtureEntry> {
    NAMES.iter().filter_map(|(n, _)| get_fixture(n)).collect()
}
