use std::sync::Arc;

use num_complex::Complex64;
use pisot_ifs::algebraic::PisotContext;
use pisot_ifs::construction::{
    approximate_in_y, build_paper_ifs, certify_ssc, hausdorff_dimension, similarity_dimension,
    witness_certificate, BuildStrategy, ConstructionError, IfsConfig, SearchCaps,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx() -> Arc<PisotContext> {
    Arc::new(PisotContext::new("1,10,1,1".parse().unwrap(), 50).unwrap())
}

/// λ = 1/θ in double precision, from the closed-form root of X³ + X² + 10X + 1.
fn lambda_f64() -> Complex64 {
    let theta = Complex64::new(-0.449542187889635, 3.115634792509952);
    1.0 / theta
}

/// Depth-one gap in plain f64: smallest distance between the centers ±a_1, ±a_2
/// minus twice the cylinder radius |λ|R, with R = max|a_j| / (1 − |λ|).
fn depth_one_gap(a: [Complex64; 2]) -> f64 {
    let lam = lambda_f64().norm();
    let r = a[0].norm().max(a[1].norm()) / (1.0 - lam);
    let centers = [-a[0], -a[1], a[0], a[1]];
    let mut d = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            d = d.min((centers[i] - centers[j]).norm());
        }
    }
    d - 2.0 * lam * r
}

#[test]
fn witness_pair_is_separated() {
    let cert = witness_certificate(&ctx()).unwrap();
    let want = depth_one_gap([Complex64::new(2.0 / 3.0, 0.0), Complex64::new(0.0, 2.0 / 3.0)]);
    assert_eq!(cert.depth, 1);
    assert!((cert.min_gap - want).abs() < 1e-9, "{} vs {want}", cert.min_gap);
    assert!((cert.min_gap - 0.32205).abs() < 1e-4);
}

#[test]
fn default_build_is_the_smallest_separated_pair() {
    let cfg = build_paper_ifs(ctx(), BuildStrategy::default()).unwrap();
    assert_eq!((cfg.a1().k(), cfg.a1().l()), (1, 0));
    assert_eq!((cfg.a2().k(), cfg.a2().l()), (2, 1));
    let cert = cfg.ssc_certificate().unwrap();
    let lam = lambda_f64();
    let want = depth_one_gap([Complex64::new(1.0, 0.0), 2.0 * lam]);
    assert!((cert.min_gap - want).abs() < 1e-9, "{} vs {want}", cert.min_gap);
    assert!((cert.min_gap - 0.17439).abs() < 1e-4);
    assert!((cfg.attractor_radius() - 1.0 / (1.0 - lam.norm())).abs() < 1e-9);
}

#[test]
fn smaller_pairs_fail_at_depth_one() {
    // (1,0),(1,1) has |a_1 − a_2| < 2|λ|R.
    let cfg = IfsConfig::new(ctx(), (1, 0), (1, 1)).unwrap();
    let lam = lambda_f64();
    assert!(depth_one_gap([Complex64::new(1.0, 0.0), lam]) < 0.0);
    assert!(certify_ssc(&cfg, 1).is_err());
}

#[test]
fn dimension_of_default_build() {
    let cfg = build_paper_ifs(ctx(), BuildStrategy::default()).unwrap();
    let d = hausdorff_dimension(&cfg).unwrap();
    let want = 4f64.ln() / 3.147899035704787f64.ln();
    assert!((d.value - want).abs() < 1e-12);
    assert!((d.value - 1.20890532669).abs() < 1e-10);
    assert!(d.error < 1e-12);
    assert!(d.value > 1.0 && d.value < 1.262);
    assert_eq!(similarity_dimension(4.0), 1.0);
}

#[test]
fn dimension_needs_certificate() {
    let cfg = IfsConfig::new(ctx(), (1, 0), (2, 1)).unwrap();
    assert!(hausdorff_dimension(&cfg).is_err());
}

#[test]
fn approximations_meet_their_tolerance() {
    let ctx = ctx();
    let lam = lambda_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let caps = SearchCaps::default();
    for eps in [0.1, 0.01, 0.001] {
        for _ in 0..100 {
            let t = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            match approximate_in_y(&ctx, t, eps, caps) {
                Ok(y) => {
                    let direct = y.k() as f64 * lam.powi(y.l() as i32);
                    assert!((direct - t).norm() < eps * (1.0 + 1e-9));
                    assert!((y.to_c64() - t).norm() < eps);
                    assert!(y.value().rad() < 1e-40);
                }
                Err(ConstructionError::SearchExhausted { best_error, eps: e, .. }) => {
                    assert_eq!(e, eps);
                    assert!(best_error >= eps);
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
}

/// Best `k λ^l` for each `l` by orthogonal projection onto the ray of `λ^l`.
fn projection_oracle(t: Complex64, eps: f64, caps: SearchCaps) -> Option<(u64, u32)> {
    let lam = lambda_f64();
    for l in 0..=caps.max_l {
        let p = lam.powi(l as i32);
        let kstar = (t * p.conj()).re / p.norm_sqr();
        if kstar > caps.max_k as f64 + 1.0 {
            return None;
        }
        let k = kstar.round().max(1.0) as u64;
        if k <= caps.max_k && (p * k as f64 - t).norm() < eps * (1.0 - 1e-6) {
            return Some((k, l));
        }
    }
    None
}

#[test]
fn two_thirds_against_projection_oracle() {
    let ctx = ctx();
    let t = Complex64::new(2.0 / 3.0, 0.0);
    let caps = SearchCaps::default();
    let (_, l) = projection_oracle(t, 1e-2, caps).unwrap();
    assert_eq!(l, 11);
    let y = approximate_in_y(&ctx, t, 1e-2, caps).unwrap();
    assert!(y.l() <= 11);
    assert!((y.to_c64() - t).norm() < 1e-2);

    // At 1e-3 neither the oracle nor the search finds anything before k overflows the cap.
    assert!(projection_oracle(t, 1e-3, caps).is_none());
    assert!(matches!(
        approximate_in_y(&ctx, t, 1e-3, caps),
        Err(ConstructionError::SearchExhausted { .. })
    ));
}

#[test]
fn oracle_hits_are_found() {
    let ctx = ctx();
    let caps = SearchCaps {
        max_l: 40,
        max_k: 100_000,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let t = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if let Some((_, l)) = projection_oracle(t, 0.05, caps) {
            // The radial candidates may miss the projection's hit at the same
            // l, but the search must not stop before a later success.
            match approximate_in_y(&ctx, t, 0.05, caps) {
                Ok(y) => assert!((y.to_c64() - t).norm() < 0.05),
                Err(e) => panic!("oracle hit at l={l} but search failed: {e}"),
            }
        }
    }
}

#[test]
fn zero_target_and_bad_eps() {
    let ctx = ctx();
    let y = approximate_in_y(&ctx, Complex64::new(0.0, 0.0), 0.1, SearchCaps::default()).unwrap();
    assert_eq!((y.k(), y.l()), (0, 0));
    for eps in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(
            approximate_in_y(&ctx, Complex64::new(1.0, 0.0), eps, SearchCaps::default()),
            Err(ConstructionError::InvalidInput(_))
        ));
    }
}

#[test]
fn perturbation_of_witness_exceeds_caps() {
    match build_paper_ifs(ctx(), BuildStrategy::perturb(0.25)) {
        Err(ConstructionError::SearchExhausted { eps, .. }) => {
            assert!((eps - 0.25 * 0.32205).abs() < 1e-4);
        }
        other => panic!("expected SearchExhausted, got {other:?}"),
    }
}

#[test]
fn perturbation_fraction_is_validated() {
    for f in [0.0, 1.0, 1.5, -0.1] {
        assert!(matches!(
            build_paper_ifs(ctx(), BuildStrategy::perturb(f)),
            Err(ConstructionError::InvalidInput(_))
        ));
    }
}

#[test]
fn ineligible_polynomials_are_refused() {
    // X³ + 3X² + X + 1 has a real root of largest modulus.
    let real = Arc::new(PisotContext::new("1,1,3,1".parse().unwrap(), 30).unwrap());
    assert!(matches!(
        build_paper_ifs(real, BuildStrategy::default()),
        Err(ConstructionError::NotEligible(_))
    ));
    // (X + 1)(X² + 1): every root lies on the unit circle.
    let unit = Arc::new(PisotContext::new("1,1,1,1".parse().unwrap(), 30).unwrap());
    assert!(build_paper_ifs(unit, BuildStrategy::default()).is_err());
}

#[test]
fn json_roundtrip() {
    let cfg = build_paper_ifs(ctx(), BuildStrategy::default()).unwrap();
    let text = cfg.to_json().unwrap();
    assert!(text.ends_with('\n'));
    let back = IfsConfig::from_json(&text).unwrap();
    assert_eq!((back.a1().k(), back.a1().l()), (1, 0));
    assert_eq!((back.a2().k(), back.a2().l()), (2, 1));
    assert_eq!(back.ssc_certificate(), cfg.ssc_certificate());
    assert_eq!(back.to_json().unwrap(), text);

    let tampered = text.replace("\"k2\": 2", "\"k2\": 1");
    assert!(IfsConfig::from_json(&tampered).is_err());
    let extra = text.replacen('{', "{\n  \"note\": 1,", 1);
    assert!(matches!(IfsConfig::from_json(&extra), Err(ConstructionError::Document(_))));
}

#[test]
fn unseparated_document_is_rejected_on_load() {
    let cfg = build_paper_ifs(ctx(), BuildStrategy::default()).unwrap();
    let mut doc = cfg.to_document().unwrap();
    doc.k2 = 1;
    doc.l2 = 1;
    assert!(IfsConfig::from_document(&doc).is_err());
    let mut doc = cfg.to_document().unwrap();
    doc.format = "other/2".into();
    assert!(matches!(IfsConfig::from_document(&doc), Err(ConstructionError::Document(_))));
}
