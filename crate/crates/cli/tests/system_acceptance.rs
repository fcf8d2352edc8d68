//! End-to-end acceptance checks for the default polynomial X³ + X² + 10X + 1.
//! Runs without the libtest harness so that every criterion prints its line
//! whether it passes or not; the process fails if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use pisot_ifs::algebraic::{verify_complex_pisot, PisotContext};
use pisot_ifs::construction::{build_paper_ifs, hausdorff_dimension, BuildStrategy, IfsConfig};
use pisot_ifs::fourier::control::uniform_disk_sup;
use pisot_ifs::fourier::{
    admissible_pisot_indices, certify_lower_bound, sup_along_pisot_direction, FourierEvaluator,
};
use pisot_ifs::measure::{
    empirical_transform_many, find_slice_frequency, sample_measure, slice_experiment, wiener_statistic,
    SliceExperiment, UnitDirection,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn context() -> Arc<PisotContext> {
    Arc::new(PisotContext::new("1,10,1,1".parse().unwrap(), 50).unwrap())
}

fn build() -> IfsConfig {
    build_paper_ifs(context(), BuildStrategy::default()).unwrap()
}

fn evaluator() -> FourierEvaluator {
    FourierEvaluator::new(build(), 1e-12).unwrap()
}

fn lower_bound_c() -> f64 {
    certify_lower_bound(&evaluator()).unwrap().c
}

fn roots() -> Outcome {
    let ctx = context();
    let poly = ctx.polynomial();
    let theta = ctx.theta().to_c64();
    let alpha = ctx.other_conjugates().next().unwrap().center();
    let close = |x: f64, y: f64| (x - y).abs() < 1e-2;
    let theta_ok = close(theta.re, -0.45) && close(theta.im, 3.11);
    let alpha_ok = alpha.im == 0.0 && close(alpha.re, -0.1);
    let m = ctx.theta_abs();
    let modulus_ok = m.lower() > 3.0 && m.upper() < 4.0;
    let unit = poly.constant_term() == 1;
    // Monic cubic: irreducible over Q exactly when it has no integer root.
    let irreducible = poly.degree() == 3 && poly.integer_roots().is_empty();
    let pisot = verify_complex_pisot(&ctx).unwrap().is_complex_pisot;
    Outcome {
        pass: theta_ok && alpha_ok && modulus_ok && unit && irreducible && pisot,
        detail: format!(
            "theta = {:.6}{:+.6}i, alpha = {:.6}, |theta| = {:.6}, constant term {}, irreducible {irreducible}, complex Pisot {pisot}",
            theta.re,
            theta.im,
            alpha.re,
            m.mid_f64(),
            poly.constant_term()
        ),
    }
}

fn decay() -> Outcome {
    let ctx = context();
    let mut violations = Vec::new();
    let mut dist = Vec::new();
    for n in -40..=60i64 {
        let r = ctx.two_re_power(n).unwrap();
        if !r.within_bound() {
            violations.push(n);
        }
        dist.push((n, r.distance()));
    }
    let alpha = ctx.other_conjugates().next().unwrap().center().norm();
    let mut worst = 0.0f64;
    for w in dist.windows(2) {
        let (n, d0) = w[0];
        let (_, d1) = w[1];
        if n >= 10 {
            worst = worst.max((d1 / d0 - alpha).abs() / alpha);
        }
    }
    Outcome {
        pass: violations.is_empty() && worst <= 0.1,
        detail: format!(
            "C = {}, rho = {}, bound violations {:?}, worst relative gap of distance ratio to |alpha| = {:.3e}",
            ctx.decay_constant(),
            ctx.rho(),
            violations,
            worst
        ),
    }
}

fn lower_bound() -> Outcome {
    let ev = evaluator();
    let lb = certify_lower_bound(&ev).unwrap();
    let c = lb.c;
    let mut min_lower = f64::INFINITY;
    let mut max_err = 0.0f64;
    let mut failures = Vec::new();
    for n in 0..=30 {
        let s = ev.transform_ball(&ev.pisot_frequency(n));
        min_lower = min_lower.min(s.modulus_lower());
        max_err = max_err.max(s.error);
        if !(s.modulus_lower() > c && s.error < c / 10.0) {
            failures.push(n);
        }
    }
    Outcome {
        pass: c > 0.0 && failures.is_empty(),
        detail: format!(
            "c = {c}, min certified |F| over N = 0..30 is {min_lower}, max error {max_err:.3e}, failing N {failures:?}"
        ),
    }
}

fn contrast() -> Outcome {
    let ev = evaluator();
    let c = certify_lower_bound(&ev).unwrap().c;
    let ctx = ev.config().context();
    let ks = admissible_pisot_indices(ctx, 1e3, 30);
    let modulus = ctx.theta().to_c64().norm();
    let mut above = 0;
    for &k in &ks {
        let rk = 4.0 * PI * modulus.powi(k as i32);
        let sup = sup_along_pisot_direction(&ev, k, 1e3, (4.0 * rk).max(1e9), 64).unwrap();
        if sup.sup_lower > c {
            above += 1;
        }
    }
    let disk = uniform_disk_sup(1e3, 1e9, 200_000);
    Outcome {
        pass: above >= 25 && disk < 0.05,
        detail: format!(
            "k = {}..{}: {above}/30 directions with certified sup > c; uniform disk sup over r >= 1e3 is {disk:.3e}",
            ks[0],
            ks[ks.len() - 1]
        ),
    }
}

// Si(x) for large x through its asymptotic series.
fn sine_integral_large(x: f64) -> f64 {
    let x2 = x * x;
    let f = (1.0 - 2.0 / x2 + 24.0 / (x2 * x2)) / x;
    let g = (1.0 - 6.0 / x2 + 120.0 / (x2 * x2)) / x2;
    PI / 2.0 - f * x.cos() - g * x.sin()
}

fn wiener_oracles() -> Outcome {
    let m = 1e4;
    let atoms = wiener_statistic(
        |t| ((Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -t)) * 0.5, 0.0),
        m,
        0.005,
        1.0,
    )
    .unwrap();
    let atoms_oracle = 0.5 + m.sin() / (2.0 * m);
    let uniform = wiener_statistic(
        |t| {
            if t == 0.0 {
                (Complex64::new(1.0, 0.0), 0.0)
            } else {
                ((Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -t)) / Complex64::new(0.0, t), 0.0)
            }
        },
        m,
        0.005,
        1.0,
    )
    .unwrap();
    let half = (m / 2.0).sin();
    let uniform_oracle = 2.0 / m * (sine_integral_large(m) - 2.0 * half * half / m);
    let atoms_ok = (atoms.value - 0.5).abs() < 1e-2 && (atoms.value - atoms_oracle).abs() <= atoms.error() + 1e-12;
    let uniform_ok = uniform.value < 1e-2 && (uniform.value - uniform_oracle).abs() <= uniform.error() + 1e-12;
    Outcome {
        pass: atoms_ok && uniform_ok,
        detail: format!(
            "two atoms {} (closed form {atoms_oracle}, bound {:.1e}); uniform [0,1] {} (closed form {uniform_oracle}, bound {:.1e})",
            atoms.value,
            atoms.error(),
            uniform.value,
            uniform.error()
        ),
    }
}

fn monte_carlo() -> Outcome {
    let ev = evaluator();
    let n = 10_000_000;
    let em = sample_measure(ev.config(), 40, n, 2024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let xis: Vec<Complex64> = (0..20)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..=1e3), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let emp = empirical_transform_many(&em, &xis);
    let mut pass = 0;
    let mut worst = 0.0f64;
    for (xi, e) in xis.iter().zip(&emp) {
        let exact = ev.transform(*xi);
        let tol = 3.0 / (n as f64).sqrt() + em.meta.truncation * xi.norm();
        let gap = (e - exact.value).norm();
        worst = worst.max(gap / tol);
        if gap <= tol + exact.error {
            pass += 1;
        }
    }
    Outcome {
        pass: pass >= 18,
        detail: format!("{pass}/20 frequencies within tolerance, worst gap/tolerance {worst:.3}"),
    }
}

fn separation() -> Outcome {
    let cfg = build();
    let cert = cfg.ssc_certificate().cloned();
    let dim = hausdorff_dimension(&cfg).unwrap();
    let gap_ok = matches!(&cert, Some(c) if c.depth == 1 && c.min_gap > 0.0);
    let dim_ok = dim.value - dim.error > 1.0 && dim.value + dim.error < 1.262;
    Outcome {
        pass: gap_ok && dim_ok,
        detail: format!(
            "a1 = {}·λ^{}, a2 = {}·λ^{}, certificate {:?}, dim = {} ± {:.1e}",
            cfg.a1().k(),
            cfg.a1().l(),
            cfg.a2().k(),
            cfg.a2().l(),
            cert.map(|c| (c.depth, c.min_gap)),
            dim.value,
            dim.error
        ),
    }
}

fn slice_trend() -> Outcome {
    let cfg = build();
    let ctx = cfg.context();
    let z = UnitDirection::pisot(ctx, 10).unwrap();
    let mut freqs = Vec::new();
    let mut missing = Vec::new();
    for n in 0..10 {
        match find_slice_frequency(ctx, &z, n, 200) {
            Ok(f) => freqs.push(f.t),
            Err(e) => missing.push(format!("t_{n}: {e}")),
        }
    }
    if !missing.is_empty() {
        return Outcome {
            pass: false,
            detail: format!(
                "direction eta^10 has {} of 10 slice frequencies; {}",
                freqs.len(),
                missing.join("; ")
            ),
        };
    }
    let lambda = cfg.context().lambda().to_c64().norm();
    let exp = SliceExperiment {
        direction: z,
        deltas: vec![lambda.powi(4), lambda.powi(6), lambda.powi(8)],
        frequencies: freqs,
        samples: 10_000_000,
        depth: 40,
        seed: 0,
        band_wiener: None,
    };
    let report = slice_experiment(&cfg, &exp).unwrap();
    let c = lower_bound_c();
    let rows = &report.rows;
    let nondecreasing = (0..10)
        .filter(|&i| {
            rows.windows(2)
                .all(|w| w[1].averages[i].plug_in >= w[0].averages[i].plug_in)
        })
        .count();
    let last = &rows[rows.len() - 1];
    let mean = last.averages.iter().map(|a| a.plug_in).sum::<f64>() / 10.0;
    Outcome {
        pass: nondecreasing >= 7 && mean > c * c / 2.0,
        detail: format!("{nondecreasing}/10 nondecreasing, mean at smallest delta {mean} vs c^2/2 = {}", c * c / 2.0),
    }
}

fn cli_pass(root: &Path) -> Vec<(String, Vec<u8>)> {
    let steps: &[&[&str]] = &[
        &["verify"],
        &["build"],
        &["certify-bound"],
        &["fourier", "--xi-re", "12.5", "--xi-im", "-3"],
        &["scan", "--dirs", "24", "--radii", "16", "--rmax", "1e8"],
        &["sample"],
        &["wiener", "--direction", "eta^10", "--M", "500"],
        &["slice", "--direction", "0.3", "--nmax", "5", "--samples", "50000"],
        &["slice", "--direction", "eta^10", "--samples", "1000"],
        &["report"],
    ];
    let mut seen = Vec::new();
    for args in steps {
        let o = Command::new(env!("CARGO_BIN_EXE_pisot-ifs"))
            .current_dir(root)
            .args(["--seed", "5"])
            .args(*args)
            .output()
            .unwrap();
        let mut record = format!("exit {:?}\n", o.status.code()).into_bytes();
        record.extend_from_slice(&o.stdout);
        record.extend_from_slice(&o.stderr);
        seen.push((args.join(" "), record));
    }
    let mut files: Vec<_> = walk(&root.join("out"));
    files.sort();
    for f in files {
        let rel = f.strip_prefix(root).unwrap().display().to_string();
        seen.push((rel, std::fs::read(&f).unwrap()));
    }
    seen
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = cli_pass(a.path());
    let rb = cli_pass(b.path());
    let names: Vec<&str> = ra.iter().map(|(n, _)| n.as_str()).collect();
    let differing: Vec<&str> = ra
        .iter()
        .zip(&rb)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let files = names.iter().filter(|n| n.starts_with("out")).count();
    Outcome {
        pass: ra.len() == rb.len() && differing.is_empty() && files >= 8,
        detail: format!("{} outputs compared ({files} files), differing: {differing:?}", ra.len()),
    }
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 9] = [
        (1, "root certification", Duration::from_secs(1), roots),
        (2, "power sum decay", Duration::from_secs(1), decay),
        (3, "Fourier lower bound", Duration::from_secs(10), lower_bound),
        (4, "non-decay contrast", Duration::from_secs(120), contrast),
        (5, "Wiener oracles", Duration::from_secs(10), wiener_oracles),
        (6, "Monte Carlo consistency", Duration::from_secs(120), monte_carlo),
        (7, "separation and dimension", Duration::from_secs(5), separation),
        (8, "slice statistic trend", Duration::from_secs(600), slice_trend),
        (9, "determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let in_time = took <= budget;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {n} ({name}): {} in {:.2} s (budget {} s{}): {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", exceeded" },
            out.detail
        );
    }
    println!("{failed} of 9 criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
