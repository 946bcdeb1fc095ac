//! Cross-module flows through the public API: classification against the
//! reduction pipeline on random inputs, torus membership, the aggregate
//! suite, and instantiation of the generic core at f32.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lagtori::classify::{classify_pq, classify_via_reduction, Branch, ClassificationOutcome};
use lagtori::germ::{displacement_energy, Energy};
use lagtori::polytope::{case_region, CaseRegion, PqCoord};
use lagtori::suite::{run_suite, sample_interior_pq, SuiteConfig, SuiteName};
use lagtori::torus::{membership_l1, product_torus_point, torus_point, TorusParam};

#[test]
fn classification_routes_agree_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 200 {
        let pq = sample_interior_pq(&mut rng, 0.05);
        if pq.p.abs() < 1e-4 {
            continue;
        }
        checked += 1;
        let direct = classify_pq(pq).unwrap().fiber().unwrap();
        let via = classify_via_reduction(pq).unwrap();
        assert!(
            (direct.xi - via.xi).abs() <= 1e-12 && (direct.zeta - via.zeta).abs() <= 1e-12,
            "route mismatch at {pq:?}: {direct:?} vs {via:?}"
        );
    }
}

#[test]
fn classified_fiber_energy_is_positive_and_move_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    for _ in 0..100 {
        let pq = sample_interior_pq(&mut rng, 0.05);
        match classify_pq(pq).unwrap() {
            ClassificationOutcome::StandardFiber { fiber, .. } => {
                match displacement_energy(fiber).unwrap() {
                    Energy::Finite(e) => assert!(e > 0.0, "nonpositive energy at {pq:?}"),
                    Energy::Unbounded => {
                        panic!("classified fiber is never the monotone center ({pq:?})")
                    }
                }
            }
            ClassificationOutcome::NonProduct { .. } => assert_eq!(pq.p, 0.0),
        }
    }
}

#[test]
fn torus_membership_separates_the_two_families() {
    let pq = PqCoord::new(0.3, 0.7);
    let fiber = classify_pq(pq).unwrap().fiber().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut off_torus = 0;
    for _ in 0..64 {
        let tp = TorusParam::new(rng.random_range(0.0..7.0), rng.random_range(0.0..7.0));
        let on_l1 = torus_point(tp, pq).unwrap();
        assert!(membership_l1(&on_l1, pq, 1e-10));
        // The standard fiber it is isotopic to is a different submanifold.
        let on_product = product_torus_point(
            fiber,
            rng.random_range(0.0..7.0),
            rng.random_range(0.0..7.0),
        )
        .unwrap();
        if !membership_l1(&on_product, pq, 1e-6) {
            off_torus += 1;
        }
    }
    assert!(off_torus > 48, "product torus unexpectedly close to L1");
}

#[test]
fn aggregate_suite_passes_at_default_density() {
    let cfg = SuiteConfig {
        grid_density: 4,
        seed: 31,
        ..Default::default()
    };
    let report = run_suite(SuiteName::All, &cfg);
    assert!(report.all_passed(), "{}", report.to_json_string());
    assert_eq!(
        report.summary.passed + report.summary.failed,
        report.checks.len()
    );
    assert_eq!(report.seed, 31);
}

#[test]
fn generic_core_instantiates_at_f32() {
    use lagtori::polytope::{PqCoord as Pq, XyCoord as Xy};
    let pq: Pq<f32> = Xy::new(0.6f32, 0.2).to_pq();
    assert!((pq.p + 0.2).abs() < 1e-6);
    let outcome = classify_pq(Pq::new(0.3f32, 0.7)).unwrap();
    let fiber = outcome.fiber().unwrap();
    assert!((fiber.xi - 0.2).abs() < 1e-6);
    assert!((fiber.zeta + 0.1).abs() < 1e-6);
    let pt = lagtori::torus::base_point(Pq::new(0.3f32, 0.7)).unwrap();
    assert!((pt.v.vec().norm() - 1.0).abs() < 1e-5);
    let z = lagtori::disk::DiskPoint::new(0.5f32, 0.1).unwrap();
    let back = lagtori::reduction::sphere_to_disk(&lagtori::reduction::disk_to_sphere(z)).unwrap();
    assert!((back.re() - 0.5).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcome_shape_matches_region(p in -0.95f64..0.95, q in 0.05f64..0.98) {
        let pq = PqCoord::new(p, q);
        let region = case_region(pq);
        match classify_pq(pq) {
            Ok(ClassificationOutcome::StandardFiber { fiber, branch }) => {
                prop_assert!(p != 0.0);
                prop_assert!(fiber.is_interior());
                let expect_pos = p > 0.0;
                let expect_case1 = region == CaseRegion::Case1;
                let ok = match branch {
                    Branch::Case1Pos => expect_pos && expect_case1,
                    Branch::Case2Pos => expect_pos && !expect_case1,
                    Branch::Case1Neg => !expect_pos && expect_case1,
                    Branch::Case2Neg => !expect_pos && !expect_case1,
                };
                prop_assert!(ok, "branch {branch:?} at ({p}, {q})");
            }
            Ok(ClassificationOutcome::NonProduct { .. }) => prop_assert_eq!(p, 0.0),
            Err(_) => {
                prop_assert!(matches!(region, CaseRegion::Boundary | CaseRegion::Outside));
            }
        }
    }
}
