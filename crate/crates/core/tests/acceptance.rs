//! Acceptance criteria, one pass/fail line each. Runs without the test harness
//! so the lines always reach the output.

use std::process::{Command, ExitCode};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use affinor::catalog::{all_fixtures, get_fixture, FixtureEntry};
use affinor::chart::Mu;
use affinor::expr::Expression;
use affinor::integrability::{check_invariant_integrability, hypotheses, local_data_at_samples, PARALLEL_TOL};
use affinor::report::{CheckReport, Status};
use affinor::sampling::sample_points;
use affinor::structure::{fundamental_form_verdict, nondegeneracy};
use affinor::submanifold::{duality_check, h_symmetry_check};
use affinor::suite::{run_suite, SuiteOptions};

mod common;

use common::{expression, jet_fd_disagreement, levi_civita_defects, point};

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(f: &FixtureEntry) -> Vec<CheckReport> {
    run_suite(&f.ambient, f.sub.as_ref(), &SuiteOptions::default())
}

fn find<'a>(reports: &'a [CheckReport], id: &str) -> Result<&'a CheckReport, String> {
    reports.iter().find(|r| r.check_id == id).ok_or_else(|| format!("no {id} report"))
}

fn fixture(name: &str) -> Result<FixtureEntry, String> {
    get_fixture(name).ok_or_else(|| format!("missing fixture {name}"))
}

fn ambient_samples(f: &FixtureEntry) -> Vec<Vec<f64>> {
    sample_points(&f.ambient.domain, 50, 24245)
}

fn structure_suite() -> Outcome {
    for f in all_fixtures() {
        let reports = suite(&f);
        let c = find(&reports, "compatibility")?;
        ensure(c.status == Status::Pass && c.max_residual <= 1e-10, || {
            format!("{}: compatibility residual {:e}", f.name, c.max_residual)
        })?;
        let nd = nondegeneracy(&f.ambient, &ambient_samples(&f)).map_err(|e| e.to_string())?;
        ensure(
            nd.nondegenerate == f.expected.nondegenerate && nd.kernel_dim == f.expected.kernel_dim,
            || format!("{}: nondegenerate={} kernel={}", f.name, nd.nondegenerate, nd.kernel_dim),
        )?;
    }
    let f = fixture("cosymplectic_r5")?;
    let nd = nondegeneracy(&f.ambient, &ambient_samples(&f)).map_err(|e| e.to_string())?;
    ensure(nd.kernel_dim == 1, || format!("cosymplectic kernel dim {}", nd.kernel_dim))
}

fn fundamental_form() -> Outcome {
    let k = fixture("kaehler_r4")?;
    let v = fundamental_form_verdict(&k.ambient, &ambient_samples(&k))
        .map_err(|e| e.to_string())?
        .ok_or("kaehler_r4 has mu=+1")?;
    ensure(v.omega_ranks.len() == 50, || "expected 50 points".into())?;
    ensure(v.max_skew_residual <= 1e-12, || format!("skew residual {:e}", v.max_skew_residual))?;
    ensure(v.omega_nondegenerate && v.consistent(), || "kaehler_r4 omega degenerate".into())?;
    let c = fixture("cosymplectic_r5")?;
    let v = fundamental_form_verdict(&c.ambient, &ambient_samples(&c))
        .map_err(|e| e.to_string())?
        .ok_or("cosymplectic_r5 has mu=+1")?;
    ensure(v.omega_ranks.len() == 50 && v.omega_ranks.iter().all(|&r| r == 4), || {
        format!("cosymplectic omega ranks {:?}", v.omega_ranks)
    })?;
    ensure(!v.omega_nondegenerate && !v.affinor_nondegenerate && v.consistent(), || {
        "cosymplectic verdicts inconsistent".into()
    })?;
    for f in [&k, &c] {
        let r = find(&suite(f), "fundamental_form")?.clone();
        ensure(r.status == Status::Pass, || format!("{}: fundamental_form {}", f.name, r.status))?;
    }
    Ok(())
}

fn gauss_weingarten() -> Outcome {
    for name in ["complex_curve", "s3_in_c2"] {
        let s = fixture(name)?.sub.ok_or("no submanifold")?;
        let samples = sample_points(&s.domain, 20, 24245);
        let d = duality_check(&s, &samples).map_err(|e| e.to_string())?;
        ensure(d.max_residual <= 1e-6, || format!("{name}: duality {:e}", d.max_residual))?;
        let h = h_symmetry_check(&s, &samples).map_err(|e| e.to_string())?;
        ensure(h.max_residual <= 1e-8, || format!("{name}: h symmetry {:e}", h.max_residual))?;
    }
    Ok(())
}

fn classification() -> Outcome {
    let expected = [
        ("flat_cr_r3_in_c2", "normal-proper", Some((2, 1))),
        ("totally_real_plane", "normal-anti-invariant", None),
        ("complex_curve", "invariant", None),
        ("contact_slice_r5", "proper", None),
    ];
    for (name, class, pq) in expected {
        let f = fixture(name)?;
        let reports = suite(&f);
        let r = find(&reports, "submanifold_class")?;
        ensure(r.detail.starts_with(&format!("class={class} ")), || format!("{name}: {}", r.detail))?;
        if let Some((p, q)) = pq {
            ensure(r.detail.contains(&format!("p={p} q={q}")), || format!("{name}: {}", r.detail))?;
        }
        if name == "contact_slice_r5" {
            ensure(r.detail.ends_with("dim Dtilde=1"), || format!("{name}: {}", r.detail))?;
        }
    }
    for f in all_fixtures().iter().filter(|f| f.sub.is_some()) {
        for r in suite(f) {
            ensure(r.status != Status::RankAmbiguous, || format!("{}: {} rank-ambiguous", f.name, r.check_id))?;
        }
    }
    Ok(())
}

fn semi_invariant_fixtures() -> Vec<FixtureEntry> {
    all_fixtures().into_iter().filter(|f| f.expected.class.is_some()).collect()
}

fn induced_structure() -> Outcome {
    let fixtures = semi_invariant_fixtures();
    ensure(fixtures.iter().any(|f| f.name == "contact_slice_r5"), || "contact_slice_r5 missing".into())?;
    for f in fixtures {
        let reports = suite(&f);
        for id in ["induced_structure", "f2_dperp_in_dperp", "dtilde_invariant"] {
            let r = find(&reports, id)?;
            ensure(r.status == Status::Pass && r.max_residual <= 1e-6, || {
                format!("{}: {id} {} {:e}", f.name, r.status, r.max_residual)
            })?;
        }
    }
    Ok(())
}

fn nondegenerate_equalities() -> Outcome {
    for name in ["flat_cr_r3_in_c2", "totally_real_plane"] {
        let reports = suite(&fixture(name)?);
        let a = find(&reports, "nondegenerate_equalities")?;
        ensure(a.status == Status::Pass && a.max_residual <= 1e-6, || format!("{name}: angle {:e}", a.max_residual))?;
        let l = find(&reports, "lagrangian")?;
        ensure(l.status == Status::Pass && l.max_residual <= 1e-8, || format!("{name}: lagrangian {:e}", l.max_residual))?;
    }
    let reports = suite(&fixture("contact_slice_r5")?);
    for id in ["nondegenerate_equalities", "lagrangian"] {
        let r = find(&reports, id)?;
        ensure(r.status == Status::Inapplicable && r.detail.contains("nondegeneracy"), || {
            format!("contact_slice_r5: {id} {} `{}`", r.status, r.detail)
        })?;
    }
    Ok(())
}

fn no_mismatch_anywhere() -> Outcome {
    for f in all_fixtures() {
        for r in suite(&f) {
            ensure(r.status != Status::Mismatch, || format!("{}: {} MISMATCH", f.name, r.check_id))?;
        }
    }
    Ok(())
}

fn invariant_integrability() -> Outcome {
    let verdict_of = |name: &str| -> Result<String, String> {
        let r = find(&suite(&fixture(name)?), "d_integrability")?.clone();
        Ok(r.detail)
    };
    let flat = verdict_of("flat_cr_r3_in_c2")?;
    ensure(flat.starts_with("verdict=all-hold"), || format!("flat_cr_r3_in_c2: {flat}"))?;
    let f = fixture("s3_in_c2")?;
    let s = f.sub.clone().ok_or("no submanifold")?;
    let samples = sample_points(&s.domain, 50, 24245);
    let data = local_data_at_samples(&s, &samples).map_err(|e| e.to_string())?;
    let hyp = hypotheses(&s, &ambient_samples(&f), &samples, PARALLEL_TOL).map_err(|e| e.to_string())?;
    let v = check_invariant_integrability(&data, &hyp);
    ensure(v.verdict.as_str() == "none-hold", || format!("s3_in_c2 verdict {}", v.verdict.as_str()))?;
    let frob = v.condition("frobenius").ok_or("no frobenius condition")?;
    ensure(frob.residual >= 1e-1, || format!("s3 frobenius {:e}", frob.residual))?;
    let q = v.condition("q_nijenhuis").ok_or("no Q N_phi condition")?;
    ensure(q.residual >= 1e-2 && q.witness.is_some(), || format!("s3 Q N_phi {:e}", q.residual))?;
    no_mismatch_anywhere()
}

fn nijenhuis_identity() -> Outcome {
    for f in all_fixtures().iter().filter(|f| f.sub.is_some()) {
        let reports = suite(f);
        let r = find(&reports, "nijenhuis_identity")?;
        ensure(r.status == Status::Pass && r.max_residual <= 1e-6, || {
            format!("{}: nijenhuis_identity {} {:e}", f.name, r.status, r.max_residual)
        })?;
        let e = find(&reports, "dperp_integrability")?;
        ensure(!matches!(e.status, Status::Mismatch | Status::Indeterminate), || {
            format!("{}: dperp_integrability {}", f.name, e.status)
        })?;
    }
    Ok(())
}

fn parallel_suite() -> Outcome {
    let mut covered = 0;
    for f in all_fixtures().iter().filter(|f| f.sub.is_some()) {
        let reports = suite(f);
        let e = &f.expected;
        if e.parallel && e.nondegenerate && f.ambient.mu == Mu::Plus {
            covered += 1;
            for id in ["weingarten_commutator", "dperp_foliation"] {
                let r = find(&reports, id)?;
                ensure(r.status == Status::Pass && r.max_residual <= 1e-5, || {
                    format!("{}: {id} {} {:e}", f.name, r.status, r.max_residual)
                })?;
            }
        }
        for id in ["d_integrability_parallel", "dperp_totally_geodesic", "d_totally_geodesic"] {
            let r = find(&reports, id)?;
            ensure(r.status != Status::Mismatch, || format!("{}: {id} MISMATCH", f.name))?;
        }
    }
    ensure(covered >= 4, || format!("only {covered} parallel fixtures"))?;
    let reports = suite(&fixture("nonparallel_r4")?);
    for id in [
        "weingarten_commutator",
        "dperp_foliation",
        "d_integrability_parallel",
        "h_phi_identity",
        "dperp_totally_geodesic",
        "chain_identity",
        "d_totally_geodesic",
    ] {
        let r = find(&reports, id)?;
        ensure(r.status == Status::Inapplicable, || format!("nonparallel_r4: {id} {}", r.status))?;
    }
    Ok(())
}

fn numerics() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let (exprs, points) = (expression(), point());
    let mut accepted = 0;
    let mut drawn = 0;
    while accepted < 1000 {
        drawn += 1;
        ensure(drawn <= 20_000, || format!("only {accepted} usable expressions"))?;
        let ast = exprs.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let p = points.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let e = Expression::from_ast(ast, 3);
        if let Some(worst) = jet_fd_disagreement(&e, &p) {
            ensure(worst <= 1e-6, || format!("{e} at {p:?}: {worst:e}"))?;
            accepted += 1;
        }
    }
    for f in all_fixtures() {
        for x in ambient_samples(&f) {
            let (compat, torsion) = levi_civita_defects(&f.ambient, &x);
            ensure(compat <= 1e-7 && torsion <= 1e-8, || {
                format!("{}: compatibility {compat:e} torsion {torsion:e}", f.name)
            })?;
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_affinor");
    for name in ["s3_in_c2", "contact_slice_r5"] {
        let spec = dir.path().join(format!("{name}.spec"));
        let status = Command::new(bin)
            .args(["export", name, spec.to_str().unwrap()])
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("export {name} failed"))?;
        let run = || {
            Command::new(bin)
                .args(["verify", spec.to_str().unwrap(), "--format", "json"])
                .output()
                .map(|o| o.stdout)
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        ensure(!a.is_empty() && a == b, || format!("{name}: JSON differs between runs"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("structure suite and nondegeneracy table", structure_suite),
        ("fundamental 2-form", fundamental_form),
        ("Gauss-Weingarten duality and h symmetry", gauss_weingarten),
        ("semi-invariant classification", classification),
        ("induced structure sub-checks", induced_structure),
        ("nondegenerate equalities and Lagrangian", nondegenerate_equalities),
        ("invariant distribution integrability", invariant_integrability),
        ("two-path Nijenhuis identity", nijenhuis_identity),
        ("parallel affinor suite", parallel_suite),
        ("jets, finite differences and Levi-Civita", numerics),
        ("byte-identical JSON", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {:>2} PASS  {name}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
