use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use pisot_ifs::algebraic::{
    verify_complex_pisot, verify_dense_rotation_criterion, AlgebraError, DenseRotationStatus,
    PisotContext,
};
use pisot_ifs::construction::{build_paper_ifs, hausdorff_dimension, BuildStrategy, ConstructionError, IfsConfig};
use pisot_ifs::fourier::{scan_directions, FourierError, FourierEvaluator, LowerBound, ScanGrid};
use pisot_ifs::measure::{
    find_slice_frequency, projection_wiener, sample_measure, slice_experiment, write_samples,
    MeasureError, SliceExperiment, UnitDirection,
};

use crate::output::{sha256_file, write_file, Csv};
use crate::{CliError, Command, RunConfig, Strategy};

const IFS_FILE: &str = "ifs.json";

fn algebra(e: AlgebraError) -> CliError {
    match e {
        AlgebraError::InvalidPolynomial(_) | AlgebraError::InvalidPrecision(_) => CliError::Usage(e.to_string()),
        _ => CliError::Certification(e.to_string()),
    }
}

fn construction(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::InvalidInput(_) => CliError::Usage(e.to_string()),
        ConstructionError::Algebra(a) => algebra(a),
        _ => CliError::Certification(e.to_string()),
    }
}

fn fourier(e: FourierError) -> CliError {
    match e {
        FourierError::InvalidInput(_) => CliError::Usage(e.to_string()),
        FourierError::Algebra(a) => algebra(a),
        _ => CliError::Certification(e.to_string()),
    }
}

fn measure(e: MeasureError) -> CliError {
    match e {
        MeasureError::InvalidInput(_) | MeasureError::StepTooCoarse { .. } => CliError::Usage(e.to_string()),
        MeasureError::Io(io) => CliError::Io(io),
        MeasureError::Fourier(f) => fourier(f),
        MeasureError::Algebra(a) => algebra(a),
        _ => CliError::Certification(e.to_string()),
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
    hash: String,
}

impl Run<'_> {
    fn context(&self) -> Result<Arc<PisotContext>, CliError> {
        let poly = self
            .cfg
            .polynomial
            .parse()
            .map_err(|e: AlgebraError| CliError::Usage(e.to_string()))?;
        Ok(Arc::new(
            PisotContext::new(poly, self.cfg.precision_digits).map_err(algebra)?,
        ))
    }

    /// The system written by `build`; later steps refuse to run without it.
    fn ifs(&self) -> Result<IfsConfig, CliError> {
        let path = self.dir.join(IFS_FILE);
        let text = std::fs::read_to_string(&path).map_err(|_| {
            CliError::Usage(format!(
                "{} not found; run `build` with this config first",
                path.display()
            ))
        })?;
        IfsConfig::from_json(&text).map_err(construction)
    }

    fn evaluator(&self) -> Result<FourierEvaluator, CliError> {
        FourierEvaluator::new(self.ifs()?, self.cfg.tail_tol).map_err(fourier)
    }

    fn csv(&self, command: &str, seeded: bool, params: &[(&str, String)]) -> Csv {
        let mut all = vec![
            ("polynomial", self.cfg.polynomial.clone()),
            ("precision_digits", self.cfg.precision_digits.to_string()),
        ];
        all.extend(params.iter().cloned());
        Csv::new(command, &self.hash, seeded.then_some(self.cfg.seed), &all)
    }
}

fn parse_direction(text: &str, ctx: &PisotContext) -> Result<UnitDirection, CliError> {
    let t = text.trim();
    let pisot = t.strip_prefix("eta^").or_else(|| t.strip_prefix("eta:"));
    if let Some(k) = pisot {
        let k: u32 = k
            .parse()
            .map_err(|_| CliError::Usage(format!("bad direction {text:?}: expected eta^K")))?;
        return UnitDirection::pisot(ctx, k).map_err(measure);
    }
    let angle: f64 = t
        .parse()
        .map_err(|_| CliError::Usage(format!("bad direction {text:?}: expected radians or eta^K")))?;
    UnitDirection::from_angle(angle, ctx.precision()).map_err(measure)
}

fn parse_deltas(text: &str, lambda_abs: f64) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            let v = match s.strip_prefix("lambda^") {
                Some(m) => m.parse::<i32>().map(|m| lambda_abs.powi(m)).ok(),
                None => s.parse::<f64>().ok(),
            };
            match v {
                Some(d) if d > 0.0 && d.is_finite() => Ok(d),
                _ => Err(CliError::Usage(format!("bad band half-width {s:?}"))),
            }
        })
        .collect()
}

pub fn dispatch(cfg: &RunConfig, command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    let run = Run {
        cfg,
        dir: cfg.run_dir(),
        hash: cfg.hash(),
    };
    match command {
        Command::Verify => verify(&run, out),
        Command::Build => build(&run, out),
        Command::CertifyBound => certify_bound(&run, out),
        Command::Fourier { xi_re, xi_im } => fourier_at(&run, Complex64::new(*xi_re, *xi_im), out),
        Command::Scan {
            dirs,
            rmin,
            rmax,
            radii,
            out: path,
        } => scan(
            &run,
            ScanGrid {
                n_dirs: *dirs,
                r_min: *rmin,
                r_max: *rmax,
                n_radii: *radii,
            },
            path.as_deref(),
            out,
        ),
        Command::Sample => sample(&run, out),
        Command::Wiener { direction, m } => wiener(&run, direction, *m, out),
        Command::Slice {
            direction,
            nmax,
            delta,
            samples,
            kcap,
        } => slice(&run, direction, *nmax, delta, samples.unwrap_or(cfg.samples), *kcap, out),
        Command::Report => report(&run, out),
    }
}

fn verify(run: &Run, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = run.context()?;
    writeln!(out, "polynomial {}", ctx.polynomial())?;
    for r in ctx.roots() {
        let c = r.center();
        writeln!(out, "root {} {} radius {:e}", c.re, c.im, r.radius())?;
    }
    let mut failures = Vec::new();
    let pisot = verify_complex_pisot(&ctx).map_err(algebra)?;
    writeln!(out, "complex_pisot {}", pisot.is_complex_pisot)?;
    if !pisot.is_complex_pisot {
        failures.push(format!(
            "not a complex Pisot number: {}",
            pisot.failure.clone().unwrap_or_default()
        ));
    }
    match verify_dense_rotation_criterion(&ctx, 64) {
        Ok(d) => {
            let status = match d.status {
                DenseRotationStatus::Holds => "holds".to_string(),
                DenseRotationStatus::Reducible { root } => format!("reducible (root {root})"),
                DenseRotationStatus::Inapplicable { degree } => format!("inapplicable in degree {degree}"),
            };
            writeln!(out, "dense_rotations {status}")?;
            if !d.holds() {
                failures.push(format!("dense rotations not certified: {status}"));
            }
        }
        Err(e) => {
            writeln!(out, "dense_rotations not certified")?;
            failures.push(e.to_string());
        }
    }
    let mut csv = run.csv("verify", false, &[]);
    csv.comment(&format!("rho={} C={}", ctx.rho(), ctx.decay_constant()));
    csv.header(&["n", "nearest", "distance", "bound", "within_bound"]);
    let mut decay_ok = true;
    if !ctx.theta_is_real() {
        for n in -40..=60 {
            let r = ctx.two_re_power(n).map_err(algebra)?;
            let ok = r.within_bound();
            decay_ok &= ok;
            csv.row(&[
                n.to_string(),
                r.nearest.to_string(),
                r.distance().to_string(),
                r.bound.to_string(),
                (ok as u8).to_string(),
            ]);
        }
        writeln!(out, "decay_checks {}", if decay_ok { "pass" } else { "fail" })?;
        if !decay_ok {
            failures.push("dist(2 Re θ^n, Z) exceeded C ρ^|n|".into());
        }
        csv.write(&run.dir.join("verify.csv"))?;
    }
    if failures.is_empty() {
        writeln!(out, "verify: certified")?;
        Ok(())
    } else {
        Err(CliError::Certification(failures.join("; ")))
    }
}

fn build(run: &Run, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = run.context()?;
    let strategy = match run.cfg.strategy {
        Strategy::Search => BuildStrategy::default(),
        Strategy::Perturb => BuildStrategy::perturb(run.cfg.eps_fraction),
    };
    let ifs = build_paper_ifs(ctx, strategy).map_err(construction)?;
    let json = ifs.to_json().map_err(construction)?;
    let path = run.dir.join(IFS_FILE);
    write_file(&path, json.as_bytes())?;
    let cert = ifs.ssc_certificate().expect("built systems are certified");
    let dim = hausdorff_dimension(&ifs).map_err(construction)?;
    writeln!(out, "polynomial {}", ifs.context().polynomial())?;
    writeln!(out, "a1 = {} * lambda^{}", ifs.a1().k(), ifs.a1().l())?;
    writeln!(out, "a2 = {} * lambda^{}", ifs.a2().k(), ifs.a2().l())?;
    writeln!(out, "separation depth {} min_gap {}", cert.depth, cert.min_gap)?;
    writeln!(out, "dim {} +- {:e}", dim.value, dim.error)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn lower_bound(ev: &FourierEvaluator) -> Result<LowerBound, CliError> {
    ev.certify_lower_bound().map_err(fourier)
}

fn certify_bound(run: &Run, out: &mut dyn Write) -> Result<(), CliError> {
    let ev = run.evaluator()?;
    let lb = lower_bound(&ev)?;
    let mut csv = run.csv("certify-bound", false, &[("tail_tol", run.cfg.tail_tol.to_string())]);
    csv.comment(&format!(
        "c={} M={} C0={} rho={} explicit_product={} tail_product={}",
        lb.c, lb.m_cut, lb.c0, lb.rho, lb.explicit_product, lb.tail_product
    ));
    csv.header(&["n", "b_n", "margin", "lower_bound"]);
    for b in &lb.factors {
        csv.row(&[
            b.n.to_string(),
            b.value.to_string(),
            b.margin.to_string(),
            b.lower_bound.to_string(),
        ]);
    }
    csv.write(&run.dir.join("bound.csv"))?;
    writeln!(out, "c {}", lb.c)?;
    writeln!(out, "M {} C0 {} rho {}", lb.m_cut, lb.c0, lb.rho)?;
    Ok(())
}

fn fourier_at(run: &Run, xi: Complex64, out: &mut dyn Write) -> Result<(), CliError> {
    if !xi.re.is_finite() || !xi.im.is_finite() {
        return Err(CliError::Usage("frequency must be finite".into()));
    }
    let s = run.evaluator()?.transform(xi);
    writeln!(out, "xi {} {}", xi.re, xi.im)?;
    writeln!(out, "value {} {}", s.value.re, s.value.im)?;
    writeln!(out, "error {}", s.error)?;
    writeln!(out, "factors {}", s.factors)?;
    Ok(())
}

fn scan(run: &Run, grid: ScanGrid, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let ev = run.evaluator()?;
    let c = lower_bound(&ev)?.c;
    let rows = scan_directions(&ev, grid, c).map_err(fourier)?;
    let mut csv = run.csv(
        "scan",
        false,
        &[
            ("dirs", grid.n_dirs.to_string()),
            ("rmin", grid.r_min.to_string()),
            ("rmax", grid.r_max.to_string()),
            ("radii", grid.n_radii.to_string()),
            ("c", c.to_string()),
        ],
    );
    csv.comment("angle in radians; exceeds_c is 1 when some certified |F| exceeds c");
    csv.header(&["angle", "best_radius", "sup_modulus", "exceeds_c"]);
    for r in &rows {
        csv.row(&[
            r.angle.to_string(),
            r.best_radius.to_string(),
            r.sup_modulus.to_string(),
            (r.exceeds_c as u8).to_string(),
        ]);
    }
    let path = path.map(Path::to_path_buf).unwrap_or_else(|| run.dir.join("scan.csv"));
    csv.write(&path)?;
    let hits = rows.iter().filter(|r| r.exceeds_c).count();
    writeln!(out, "scanned {} directions; {} exceed c = {}", rows.len(), hits, c)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn sample(run: &Run, out: &mut dyn Write) -> Result<(), CliError> {
    let ifs = run.ifs()?;
    let em = sample_measure(&ifs, run.cfg.depth, run.cfg.samples, run.cfg.seed).map_err(measure)?;
    let path = run.dir.join(format!("samples-s{}.pslm", run.cfg.seed));
    let mut buf = Vec::with_capacity(16 + 16 * em.len());
    write_samples(&mut buf, &em.points).map_err(measure)?;
    write_file(&path, &buf)?;
    writeln!(out, "samples {} depth {} seed {}", em.len(), em.meta.depth, em.meta.seed)?;
    writeln!(out, "truncation {}", em.meta.truncation)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn wiener(run: &Run, direction: &str, m: f64, out: &mut dyn Write) -> Result<(), CliError> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(CliError::Usage(format!("--M must be positive, got {m}")));
    }
    let ev = run.evaluator()?;
    let z = parse_direction(direction, ev.config().context())?;
    let step = PI / (4.0 * ev.config().attractor_radius());
    let cutoffs = [m / 100.0, m / 10.0, m];
    let mut csv = run.csv(
        "wiener",
        false,
        &[
            ("direction", direction.to_string()),
            ("angle", z.angle().to_string()),
            ("M", m.to_string()),
            ("step", step.to_string()),
        ],
    );
    csv.header(&["M", "value", "quadrature_error", "evaluation_error", "step", "nodes"]);
    let mut values = Vec::new();
    for &mm in &cutoffs {
        let w = projection_wiener(&ev, &z, mm, step.min(mm)).map_err(measure)?;
        csv.row(&[
            mm.to_string(),
            w.value.to_string(),
            w.quadrature_error.to_string(),
            w.evaluation_error.to_string(),
            w.step.to_string(),
            w.nodes.to_string(),
        ]);
        writeln!(out, "M {} statistic {}", mm, w.value)?;
        values.push(w.value);
    }
    let non_decay = values[2] > values[0];
    csv.comment(&format!("non_decay={}", non_decay as u8));
    csv.write(&run.dir.join("wiener.csv"))?;
    writeln!(out, "non_decay {non_decay}")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn slice(
    run: &Run,
    direction: &str,
    nmax: u64,
    delta: &str,
    samples: usize,
    kcap: u32,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if !(1..=100_000_000).contains(&samples) {
        return Err(CliError::Usage(format!("--samples must be in 1..=1e8, got {samples}")));
    }
    let ev = run.evaluator()?;
    let ifs = ev.config();
    let ctx = ifs.context();
    let z = parse_direction(direction, ctx)?;
    let deltas = parse_deltas(delta, ctx.lambda().to_c64().norm())?;
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for n in 0..=nmax {
        match find_slice_frequency(ctx, &z, n, kcap) {
            Ok(f) => found.push(f),
            Err(MeasureError::SliceNotFound {
                nearest_k,
                nearest_t,
                precision_limited,
                ..
            }) => missing.push(format!(
                "n={n} nearest_k={nearest_k} nearest_t={nearest_t} precision_limited={}",
                precision_limited as u8
            )),
            Err(e) => return Err(measure(e)),
        }
    }
    for m in &missing {
        writeln!(out, "no frequency: {m}")?;
    }
    if found.is_empty() {
        return Err(CliError::Certification(format!(
            "no slice frequency t_n with n ≤ {nmax} and k ≤ {kcap} for direction {direction}"
        )));
    }
    let c = lower_bound(&ev)?.c;
    let exp = SliceExperiment {
        direction: z.clone(),
        deltas,
        frequencies: found.iter().map(|f| f.t).collect(),
        samples,
        depth: run.cfg.depth,
        seed: run.cfg.seed,
        band_wiener: None,
    };
    let report = slice_experiment(ifs, &exp).map_err(measure)?;
    let mut csv = run.csv(
        "slice",
        true,
        &[
            ("direction", direction.to_string()),
            ("angle", z.angle().to_string()),
            ("nmax", nmax.to_string()),
            ("kcap", kcap.to_string()),
            ("samples", samples.to_string()),
            ("depth", run.cfg.depth.to_string()),
            ("c_squared", (c * c).to_string()),
        ],
    );
    for m in &missing {
        csv.comment(&format!("missing {m}"));
    }
    csv.header(&["delta", "n", "k", "t", "plug_in", "debiased", "bands", "dropped_mass"]);
    for row in &report.rows {
        for (f, a) in found.iter().zip(&row.averages) {
            csv.row(&[
                row.delta.to_string(),
                f.n.to_string(),
                f.k.to_string(),
                f.t.to_string(),
                a.plug_in.to_string(),
                a.debiased.to_string(),
                row.bands.to_string(),
                row.dropped_mass.to_string(),
            ]);
        }
        let mean = row.averages.iter().map(|a| a.debiased).sum::<f64>() / row.averages.len() as f64;
        writeln!(out, "delta {} bands {} mean_debiased {}", row.delta, row.bands, mean)?;
    }
    let path = run.dir.join(format!("slice-s{}.csv", run.cfg.seed));
    csv.write(&path)?;
    writeln!(out, "c^2 {}", c * c)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn report(run: &Run, out: &mut dyn Write) -> Result<(), CliError> {
    let ifs = run.ifs()?;
    let ev = FourierEvaluator::new(ifs.clone(), run.cfg.tail_tol).map_err(fourier)?;
    let mut text = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(text, "config_hash {}", run.hash);
    let _ = writeln!(text, "polynomial {}", ifs.context().polynomial());
    let _ = writeln!(text, "precision_digits {}", run.cfg.precision_digits);
    let _ = writeln!(text, "a1 {} * lambda^{}", ifs.a1().k(), ifs.a1().l());
    let _ = writeln!(text, "a2 {} * lambda^{}", ifs.a2().k(), ifs.a2().l());
    if let Some(cert) = ifs.ssc_certificate() {
        let _ = writeln!(text, "separation depth {} min_gap {}", cert.depth, cert.min_gap);
    }
    let dim = hausdorff_dimension(&ifs).map_err(construction)?;
    let _ = writeln!(text, "dim {}", dim.value);
    match ev.certify_lower_bound() {
        Ok(lb) => {
            let _ = writeln!(text, "c {}", lb.c);
        }
        Err(e) => {
            let _ = writeln!(text, "c not certified: {e}");
        }
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(&run.dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != "report.txt"))
        .collect();
    files.sort();
    for f in files {
        let size = std::fs::metadata(&f)?.len();
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        let _ = writeln!(text, "file {name} {size} sha256 {}", sha256_file(&f)?);
    }
    write_file(&run.dir.join("report.txt"), text.as_bytes())?;
    out.write_all(text.as_bytes())?;
    Ok(())
}
