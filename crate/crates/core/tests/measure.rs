use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use pisot_ifs::algebraic::PisotContext;
use pisot_ifs::construction::{build_paper_ifs, BuildStrategy, IfsConfig};
use pisot_ifs::fourier::FourierEvaluator;
use pisot_ifs::measure::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> &'static IfsConfig {
    static CFG: OnceLock<IfsConfig> = OnceLock::new();
    CFG.get_or_init(|| {
        let ctx = Arc::new(PisotContext::new("1,10,1,1".parse().unwrap(), 50).unwrap());
        build_paper_ifs(ctx, BuildStrategy::default()).unwrap()
    })
}

fn evaluator() -> FourierEvaluator {
    FourierEvaluator::new(cfg().clone(), 1e-12).unwrap()
}

#[test]
fn empirical_transform_agrees_with_product_formula() {
    let ev = evaluator();
    let n = 400_000;
    let em = sample_measure(cfg(), 40, n, 77).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xis: Vec<Complex64> = (0..20)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..1e3), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let emp = empirical_transform_many(&em, &xis);
    let mut pass = 0;
    for (xi, e) in xis.iter().zip(&emp) {
        let exact = ev.transform(*xi);
        let tol = 3.0 / (n as f64).sqrt() + em.meta.truncation * xi.norm() + exact.error;
        if (e.re - exact.value.re).abs() <= tol {
            pass += 1;
        }
        // The sample is symmetric only in law, so Im is pure noise.
        assert!(e.im.abs() < 6.0 / (n as f64).sqrt());
    }
    assert!(pass >= 18, "{pass}/20");
}

#[test]
fn empirical_transform_at_a_pisot_frequency() {
    let ev = evaluator();
    let n = 400_000;
    let em = sample_measure(cfg(), 40, n, 5).unwrap();
    let xi = ev.pisot_frequency(3);
    let want = ev.transform_ball(&xi).value.re;
    let got = empirical_transform(&em, xi.to_c64()).re;
    assert!((got - want).abs() < 3.0 / (n as f64).sqrt() + em.meta.truncation * xi.to_c64().norm());
}

#[test]
fn projection_commutes_with_sampling() {
    let em = sample_measure(cfg(), 18, 5000, 21).unwrap();
    let z = Complex64::from_polar(1.0, 2.2);
    let line = project(&em, z).unwrap();
    for (p, x) in em.points.iter().zip(&line.points) {
        assert_eq!(*x, (p * z.conj()).re);
    }
    assert_eq!(line.weights, em.weights);
}

#[test]
fn discrete_measure_wiener_converges_to_sum_of_squares() {
    let atoms = [(0.0, 0.5), (0.7, 0.3), (2.1, 0.2)];
    let sum_sq: f64 = atoms.iter().map(|(_, p)| p * p).sum();
    let ft = |t: f64| {
        let v: Complex64 = atoms.iter().map(|&(x, p)| Complex64::from_polar(p, t * x)).sum();
        (v, 0.0)
    };
    // |stat − Σp²| = |Σ_{i≠j} p_i p_j sinc(MΔ_ij)| ≤ Σ_{i≠j} p_i p_j / (M Δ_ij).
    let envelope = |m: f64| -> f64 {
        let mut s = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            for (j, b) in atoms.iter().enumerate() {
                if i != j {
                    s += a.1 * b.1 / (m * (a.0 - b.0).abs());
                }
            }
        }
        s
    };
    let mut last_bound = f64::INFINITY;
    let mut last_err = f64::INFINITY;
    for m in [1e2, 1e3, 1e4] {
        let w = wiener_statistic(ft, m, 1e-3, 2.1).unwrap();
        let err = (w.value - sum_sq).abs();
        let bound = w.error() + envelope(m);
        assert!(err <= bound, "M={m}: {err} > {bound}");
        assert!(bound < last_bound);
        assert!(err < last_err);
        last_bound = bound;
        last_err = err;
    }
    assert!(last_err < 1e-4);
}

#[test]
fn uniform_interval_wiener_decays_like_one_over_m() {
    // |ℱ|² = sinc²(t/2) integrates to 2π over the line.
    let ft = |t: f64| {
        let v = if t == 0.0 { 1.0 } else { (t / 2.0).sin() / (t / 2.0) };
        (Complex64::new(v, 0.0), 0.0)
    };
    for m in [1e2, 1e3, 1e4] {
        let w = wiener_statistic(ft, m, 0.05, 1.0).unwrap();
        let closed = PI / m;
        assert!((w.value - closed).abs() < 4.0 / (m * m) + 1e-7, "M={m}: {} vs {closed}", w.value);
    }
}

#[test]
fn generic_directions_decay() {
    let ev = evaluator();
    let prec = cfg().context().precision();
    let step = PI / (4.0 * cfg().attractor_radius());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut flagged = 0;
    for _ in 0..100 {
        let z = UnitDirection::from_angle(rng.gen_range(0.0..2.0 * PI), prec).unwrap();
        if wiener_decay_check(&ev, &z, 1e2, 1e4, step).unwrap().non_decay {
            flagged += 1;
        }
    }
    assert!(flagged <= 10, "{flagged} of 100 random directions flagged");
}

#[test]
fn projection_wiener_step_is_checked() {
    let ev = evaluator();
    let z = UnitDirection::from_angle(0.0, cfg().context().precision()).unwrap();
    let required = PI / (4.0 * cfg().attractor_radius());
    match projection_wiener(&ev, &z, 10.0, required * 1.01) {
        Err(MeasureError::StepTooCoarse { required: r, .. }) => assert!((r - required).abs() < 1e-15),
        other => panic!("{other:?}"),
    }
}

#[test]
fn slice_frequencies_are_in_window_or_reported() {
    let ctx = cfg().context();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut hits = 0;
    for _ in 0..100 {
        let z = UnitDirection::from_angle(rng.gen_range(0.0..2.0 * PI), ctx.precision()).unwrap();
        for n in 0..=20u64 {
            match find_slice_frequency(ctx, &z, n, 200) {
                Ok(f) => {
                    hits += 1;
                    assert!(f.t - f.t_radius > n as f64 && f.t + f.t_radius < n as f64 + 1.0);
                    // Smallest k: no earlier k lands in the window.
                    if f.k > 0 {
                        assert!(find_slice_frequency(ctx, &z, n, f.k - 1).is_err());
                    }
                }
                Err(MeasureError::SliceNotFound { nearest_t, .. }) => {
                    assert!(!(nearest_t > n as f64 && nearest_t < n as f64 + 1.0));
                }
                Err(e) => panic!("{e}"),
            }
        }
    }
    // Each window has width 1 while |t_k| grows like 4π|θ|^k, so hits are rare.
    assert!(hits > 0);
}

#[test]
fn sample_dump_roundtrip_through_a_file() {
    let em = sample_measure(cfg(), 10, 1234, 6).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.pslm");
    write_samples(std::fs::File::create(&path).unwrap(), &em.points).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 16 + 16 * 1234);
    let back = read_samples(&bytes[..]).unwrap();
    assert_eq!(back, em.points);
}

#[test]
fn degenerate_band_matches_projection_wiener() {
    let em = sample_measure(cfg(), 30, 4000, 12).unwrap();
    let z = UnitDirection::from_angle(0.4, cfg().context().precision()).unwrap();
    let r = cfg().attractor_radius();
    let step = PI / (4.0 * r);
    let exp = SliceExperiment {
        direction: z.clone(),
        deltas: vec![4.0 * r],
        frequencies: vec![1.0],
        samples: em.len(),
        depth: 30,
        seed: 12,
        band_wiener: Some(BandWiener { m: 20.0, step }),
    };
    let report = pisot_ifs::measure::slice_report(&em, &exp, r).unwrap();
    let line = project(&em, z.perp()).unwrap();
    let direct = wiener_statistic(|t| (line.transform(t), 0.0), 20.0, step, 2.0 * r).unwrap();
    assert_eq!(report.rows[0].bands, 1);
    assert!((report.rows[0].band_wiener.unwrap() - direct.value).abs() < 1e-12);
}
