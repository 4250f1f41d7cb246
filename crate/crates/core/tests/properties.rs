//! Property tests: jets against finite differences, printing, connection
//! identities, projector algebra, and invariance of sample reductions.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use affinor::catalog::{all_fixtures, get_fixture};
use affinor::chart::{lie_bracket, ExprField, Mu, VectorField};
use affinor::expr::Expression;
use affinor::integrability::{d_frobenius, dperp_frobenius, local_data_at_samples, nijenhuis_phi};
use affinor::sampling::{max_over, sample_points, Extremum};
use affinor::semi_invariant::split_at;
use affinor::submanifold::{frames_at, normal_basis_field, second_fundamental_form, weingarten_operator};

mod common;

use common::{curved, expression, jet_fd_disagreement, levi_civita_defects, point};

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, max_global_rejects: 20_000, ..ProptestConfig::default() })]

    #[test]
    fn jet_gradient_and_hessian_match_finite_differences(ast in expression(), p in point()) {
        let e = Expression::from_ast(ast, 3);
        let worst = jet_fd_disagreement(&e, &p);
        prop_assume!(worst.is_some());
        let worst = worst.unwrap();
        prop_assert!(worst <= 1e-6, "{} at {:?}: relative disagreement {}", e, p, worst);
    }

    #[test]
    fn printing_then_parsing_gives_back_the_tree(ast in expression()) {
        let e = Expression::from_ast(ast, 3);
        let again = Expression::parse(&e.to_string(), 3).unwrap();
        prop_assert_eq!(again, e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn levi_civita_is_metric_and_torsion_free(p in point()) {
        let (compat, torsion) = levi_civita_defects(&curved(), &p);
        prop_assert!(compat <= 1e-7, "metric compatibility {compat}");
        prop_assert!(torsion <= 1e-8, "torsion {torsion}");
        for f in all_fixtures() {
            let x: Vec<f64> = (0..f.ambient.dim).map(|i| p[i % 3]).collect();
            let (compat, torsion) = levi_civita_defects(&f.ambient, &x);
            prop_assert!(compat <= 1e-7 && torsion <= 1e-8, "{}", f.name);
        }
    }

    #[test]
    fn projectors_are_complementary_idempotents(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        for f in all_fixtures() {
            let Some(s) = &f.sub else { continue };
            let u: Vec<f64> = s
                .domain
                .iter()
                .zip([a, b, c])
                .map(|(iv, t)| iv.lo + t * (iv.hi - iv.lo))
                .collect();
            let split = split_at(s, &u).unwrap();
            let pq = split.projectors();
            let n = s.dim;
            let id = DMatrix::<f64>::identity(n, n);
            prop_assert!((&pq.p * &pq.p - &pq.p).amax() <= 1e-10, "{}", f.name);
            prop_assert!((&pq.q * &pq.q - &pq.q).amax() <= 1e-10, "{}", f.name);
            prop_assert!((&pq.p * &pq.q).amax() <= 1e-10, "{}", f.name);
            prop_assert!((&pq.p + &pq.q - id).amax() <= 1e-10, "{}", f.name);
            prop_assert!(pq.defect() <= 1e-10);
        }
    }

    #[test]
    fn tangent_and_normal_frames_are_orthonormal(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        for f in all_fixtures() {
            let Some(s) = &f.sub else { continue };
            let u: Vec<f64> = s
                .domain
                .iter()
                .zip([a, b, c])
                .map(|(iv, t)| iv.lo + t * (iv.hi - iv.lo))
                .collect();
            prop_assert!(frames_at(s, &u).unwrap().orthonormality_defect() <= 1e-10, "{}", f.name);
        }
    }

    #[test]
    fn weingarten_is_dual_to_second_fundamental_form(
        a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0,
        xi in prop::collection::vec(-1.0f64..1.0, 3),
        eta in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        for name in ["s3_in_c2", "complex_curve", "clifford_torus"] {
            let s = get_fixture(name).unwrap().sub.unwrap();
            let n = s.dim;
            let u: Vec<f64> = s.domain.iter().zip([a, b, c]).map(|(iv, t)| iv.lo + t * (iv.hi - iv.lo)).collect();
            let frame = frames_at(&s, &u).unwrap();
            let xi = DVector::from_column_slice(&xi[..n]);
            let eta = DVector::from_column_slice(&eta[..n]);
            let h = second_fundamental_form(&frame, &xi, &eta);
            for k in 0..frame.normal_basis.ncols() {
                let v = normal_basis_field(&s, &frame, k);
                let (a_v, _) = weingarten_operator(&frame, v.as_ref(), &xi).unwrap();
                let vk = frame.normal_basis.column(k).into_owned();
                let lhs = frame.inner().dot(&h, &vk);
                let rhs = frame.inner().dot(&a_v, &frame.push(&eta));
                prop_assert!((lhs - rhs).abs() <= 1e-6, "{name}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn brackets_and_nijenhuis_are_antisymmetric(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        let s = get_fixture("s3_in_c2").unwrap().sub.unwrap();
        let u: Vec<f64> = s.domain.iter().zip([a, b, c]).map(|(iv, t)| iv.lo + t * (iv.hi - iv.lo)).collect();
        let x: Arc<dyn VectorField> = Arc::new(ExprField::parse(3, &["1", "u1*u2", "sin(u3)"]).unwrap());
        let y: Arc<dyn VectorField> = Arc::new(ExprField::parse(3, &["u3", "1", "u1^2"]).unwrap());
        let xy = lie_bracket(x.as_ref(), y.as_ref(), &u).unwrap();
        let yx = lie_bracket(y.as_ref(), x.as_ref(), &u).unwrap();
        prop_assert!((&xy + &yx).amax() <= 1e-12);
        let nxy = nijenhuis_phi(&s, &x, &y, &u).unwrap();
        let nyx = nijenhuis_phi(&s, &y, &x, &u).unwrap();
        prop_assert!((&nxy + &nyx).amax() <= 1e-6 * (1.0 + nxy.amax()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sample_reductions_ignore_sample_order(seed in any::<u64>(), rotate in 0usize..10) {
        let s = get_fixture("s3_in_c2").unwrap().sub.unwrap();
        let samples = sample_points(&s.domain, 10, seed);
        let mut shuffled = samples.clone();
        shuffled.rotate_left(rotate);
        shuffled.reverse();
        let fwd = d_frobenius(&local_data_at_samples(&s, &samples).unwrap());
        let bwd = d_frobenius(&local_data_at_samples(&s, &shuffled).unwrap());
        prop_assert_eq!(fwd.value, bwd.value);
        prop_assert_eq!(fwd.witness, bwd.witness);

        let f = |u: &[f64]| Ok(u.iter().map(|v| v.sin()).sum::<f64>());
        let a: Extremum = max_over(&samples, f).unwrap();
        let b: Extremum = max_over(&shuffled, f).unwrap();
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn anti_invariant_distribution_integrable_under_parallel_hypotheses(seed in any::<u64>()) {
        for f in all_fixtures() {
            let e = &f.expected;
            let Some(s) = &f.sub else { continue };
            if !(e.nondegenerate && e.parallel && f.ambient.mu == Mu::Plus) {
                continue;
            }
            let samples = sample_points(&s.domain, 8, seed);
            let r = dperp_frobenius(&local_data_at_samples(s, &samples).unwrap());
            prop_assert!(r.value <= 1e-5, "{}: {}", f.name, r.value);
        }
    }
}
