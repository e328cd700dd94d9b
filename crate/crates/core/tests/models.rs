//! Cross-module checks through the public API, each against an oracle that
//! does not share code with the path under test.

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use ous_core::calculus::{self, RealFunction};
use ous_core::compression;
use ous_core::harness::{gen, replay_witness, run_suite, Suite, SuiteConfig};
use ous_core::{parse_element, ModelContext, SeededRng, VerificationReport};

fn models() -> Vec<ModelContext> {
    vec![
        ModelContext::matrix(1).unwrap(),
        ModelContext::matrix(3).unwrap(),
        ModelContext::matrix(5).unwrap(),
        ModelContext::spin_lp(2.0, 3).unwrap(),
        ModelContext::spin_lp(3.0, 2).unwrap(),
        ModelContext::spin_lp(1.5, 4).unwrap(),
    ]
}

#[test]
fn matrix_spectrum_matches_library_eigensolver() {
    let ctx = ModelContext::matrix(6).unwrap();
    for seed in 0..20 {
        let mut rng = SeededRng::new(seed);
        let a = gen::random_element(&ctx, &mut rng).unwrap();
        let mut lib: Vec<f64> = ctx.to_matrix(&a).unwrap().symmetric_eigen().eigenvalues.iter().copied().collect();
        lib.sort_by(f64::total_cmp);
        let spec = ctx.spectrum(&a).unwrap();
        // generic elements have simple spectrum
        assert_eq!(spec.len(), 6);
        for (x, y) in spec.values().iter().zip(&lib) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }
}

#[test]
fn spin_spectrum_is_alpha_plus_minus_dual_norm() {
    let ctx = ModelContext::spin_lp(3.0, 2).unwrap();
    let a = ctx.spin_element(1.0, &[3.0, -4.0]).unwrap();
    // dual exponent 3/2
    let r = (3f64.powf(1.5) + 4f64.powf(1.5)).powf(1.0 / 1.5);
    let v = ctx.spectrum(&a).unwrap().values();
    assert_abs_diff_eq!(v[0], 1.0 - r, epsilon = 1e-12);
    assert_abs_diff_eq!(v[1], 1.0 + r, epsilon = 1e-12);
    assert_abs_diff_eq!(ctx.order_unit_norm(&a).unwrap(), 1.0 + r, epsilon = 1e-12);
}

#[test]
fn closed_form_norm_agrees_with_bisection() {
    for ctx in models() {
        let mut rng = SeededRng::new(3);
        for _ in 0..50 {
            let a = gen::random_element(&ctx, &mut rng).unwrap();
            let n1 = ctx.order_unit_norm(&a).unwrap();
            let n2 = ctx.norm_by_bisection(&a).unwrap();
            assert!((n1 - n2).abs() <= 1e-8 * (1.0 + n1), "{}: {n1} vs {n2}", ctx.descriptor());
        }
    }
}

#[test]
fn square_by_calculus_is_jordan_square() {
    for ctx in models() {
        let mut rng = SeededRng::new(9);
        for _ in 0..20 {
            let a = gen::random_element(&ctx, &mut rng).unwrap();
            let fc = calculus::continuous_fc(&ctx, &a, &RealFunction::Square).unwrap();
            let direct = ctx.jordan_product(&a, &a).unwrap();
            assert!(ctx.distance(&fc, &direct).unwrap() <= 1e-9 * (1.0 + ctx.order_unit_norm(&direct).unwrap()));
        }
    }
}

#[test]
fn matrix_compression_is_pap() {
    let ctx = ModelContext::matrix(4).unwrap();
    let mut rng = SeededRng::new(1);
    for _ in 0..20 {
        let p = gen::random_projection(&ctx, &mut rng).unwrap();
        let a = gen::random_element(&ctx, &mut rng).unwrap();
        let (pm, am) = (ctx.to_matrix(p.element()).unwrap(), ctx.to_matrix(&a).unwrap());
        let expected: DMatrix<f64> = &pm * &am * &pm;
        let got = ctx.to_matrix(&ctx.compress(&p, &a).unwrap()).unwrap();
        assert!((got - expected).norm() < 1e-12);
    }
}

#[test]
fn decompositions_reconstruct() {
    for ctx in models() {
        let mut rng = SeededRng::new(4);
        for _ in 0..20 {
            let a = gen::random_clustered_element(&ctx, &mut rng).unwrap();
            let d = compression::orthogonal_decomposition(&ctx, &a).unwrap();
            let back = &d.a_plus - &d.a_minus;
            assert!(ctx.distance(&back, &a).unwrap() < 1e-9 * (1.0 + ctx.order_unit_norm(&a).unwrap()));
            assert!(ctx.cone_contains(&d.a_plus).unwrap() && ctx.cone_contains(&d.a_minus).unwrap());
            let least = compression::least_projection_decomposition(&ctx, &a).unwrap();
            assert!(ctx.distance(&least.a_plus, &d.a_plus).unwrap() < 1e-9 * (1.0 + ctx.order_unit_norm(&a).unwrap()));
        }
    }
}

#[test]
fn resolution_rebuilds_element() {
    for ctx in models() {
        let mut rng = SeededRng::new(2);
        let a = gen::random_clustered_element(&ctx, &mut rng).unwrap();
        let res = calculus::spectral_resolution(&ctx, &a).unwrap();
        let back = res.apply(&ctx, |t| t);
        assert!(ctx.distance(&back, &a).unwrap() < 1e-9 * (1.0 + ctx.order_unit_norm(&a).unwrap()));
        let (lo, hi) = calculus::spectral_bounds(&ctx, &a).unwrap();
        assert!(ctx.distance(res.at(&ctx, hi).element(), &ctx.unit()).unwrap() < 1e-12);
        assert!(res.at(&ctx, lo - 1.0).element().max_abs() < 1e-12);
    }
}

#[test]
fn elements_round_trip_through_text() {
    for ctx in models() {
        let mut rng = SeededRng::new(6);
        let a = gen::random_element(&ctx, &mut rng).unwrap();
        let text = ctx.format_element(&a).unwrap();
        let (ctx2, b) = parse_element(&text).unwrap();
        assert_eq!(ctx2.descriptor(), ctx.descriptor());
        assert_eq!(a, b);
    }
}

#[test]
fn suites_are_deterministic_and_seed_dependent() {
    let ctx = ModelContext::spin_lp(3.0, 3).unwrap();
    let cfg = SuiteConfig::new(ctx.clone(), 11, 15).unwrap();
    let a = run_suite(&cfg).to_text();
    assert_eq!(a, run_suite(&cfg).to_text());
    let other = SuiteConfig::new(ctx, 12, 15).unwrap();
    assert_ne!(a, run_suite(&other).to_text());
    assert_eq!(VerificationReport::from_text(&a).unwrap().to_text(), a);
}

#[test]
fn failing_reports_carry_replayable_witnesses() {
    for p in [1.5, 3.0, 5.0] {
        let ctx = ModelContext::spin_lp(p, 3).unwrap();
        let cfg = SuiteConfig::with_suites(ctx.clone(), 0, 30, vec![Suite::JbCondition]).unwrap();
        let report = run_suite(&cfg);
        assert!(!report.passed());
        assert!(!report.witnesses.is_empty());
        for w in &report.witnesses {
            let (suite, check) = w.label.split_once('/').unwrap();
            let elems: Vec<_> = w.elements.iter().map(|e| parse_element(e).unwrap().1).collect();
            let v = replay_witness(&ctx, suite.parse().unwrap(), check, &elems).unwrap();
            assert!((v - w.value).abs() <= 0.01 * w.value, "{}: {v} vs {}", w.label, w.value);
        }
    }
}

#[test]
fn euclidean_models_pass_every_suite() {
    for ctx in [ModelContext::matrix(4).unwrap(), ModelContext::spin_lp(2.0, 3).unwrap()] {
        let report = run_suite(&SuiteConfig::new(ctx.clone(), 0, 40).unwrap());
        assert!(report.passed(), "{}\n{}", ctx.descriptor(), report.to_text());
    }
}
