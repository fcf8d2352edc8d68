use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{sample_measure, wiener_statistic, EmpiricalMeasure, MeasureError, UnitDirection};
use crate::algebraic::PisotContext;
use crate::construction::IfsConfig;
use crate::hp::{pi, CBall};

/// `t = ⟨4π θ̄^k, z^⊥⟩ = 4π Im(θ^k z)` certified to lie in `(n, n+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceFrequency {
    pub n: u64,
    pub k: u32,
    pub t: f64,
    /// Radius of the ball that certified `t`.
    pub t_radius: f64,
}

/// Smallest `k ≤ k_cap` whose frequency `⟨4π θ̄^k, z^⊥⟩` is certified to lie
/// strictly inside `(n, n+1)`.
pub fn find_slice_frequency(
    ctx: &PisotContext,
    z: &UnitDirection,
    n: u64,
    k_cap: u32,
) -> Result<SliceFrequency, MeasureError> {
    let four_pi = pi(ctx.precision()).mul_int(&4.into());
    let (lo, hi) = (n as f64, n as f64 + 1.0);
    let mut pow = CBall::one(ctx.precision());
    let mut nearest = (0u32, f64::NAN, f64::INFINITY);
    let mut precision_limited = false;
    for k in 0..=k_cap {
        if k > 0 {
            pow = &pow * ctx.theta();
        }
        let t = &(&pow * z.ball()).im() * &four_pi;
        if t.strictly_within(lo, hi) {
            return Ok(SliceFrequency {
                n,
                k,
                t: t.mid_f64(),
                t_radius: t.rad(),
            });
        }
        let (a, b) = (t.lower(), t.upper());
        if b > lo && a < hi {
            // The ball meets the window without fitting inside it.
            precision_limited = true;
        }
        let mid = t.mid_f64();
        let miss = if mid < lo {
            lo - mid
        } else if mid > hi {
            mid - hi
        } else {
            0.0
        };
        if miss < nearest.2 {
            nearest = (k, mid, miss);
        }
    }
    Err(MeasureError::SliceNotFound {
        n,
        k_cap,
        nearest_k: nearest.0,
        nearest_t: nearest.1,
        precision_limited,
    })
}

/// The band `V_w(δ) = {x : |⟨x − w, z⟩| < δ}` around the slice line through `w`.
#[derive(Clone, Debug)]
pub struct SliceSpec {
    z: UnitDirection,
    w: Complex64,
    delta: f64,
}

impl SliceSpec {
    pub fn new(z: UnitDirection, w: Complex64, band_halfwidth: f64) -> Result<Self, MeasureError> {
        if !(band_halfwidth > 0.0) || !band_halfwidth.is_finite() {
            return Err(MeasureError::InvalidInput(format!(
                "band half-width must be positive, got {band_halfwidth}"
            )));
        }
        Ok(Self {
            z,
            w,
            delta: band_halfwidth,
        })
    }

    pub fn direction(&self) -> &UnitDirection {
        &self.z
    }

    pub fn base_point(&self) -> Complex64 {
        self.w
    }

    pub fn band_halfwidth(&self) -> f64 {
        self.delta
    }

    pub fn contains(&self, x: Complex64) -> bool {
        let d = x - self.w;
        let z = self.z.to_c64();
        (d.re * z.re + d.im * z.im).abs() < self.delta
    }

    /// `⟨x − w, z^⊥⟩`, the coordinate of `x` along the slice line.
    pub fn recentre(&self, x: Complex64) -> f64 {
        let d = x - self.w;
        let p = self.z.perp();
        d.re * p.re + d.im * p.im
    }
}

/// Wiener statistic of each band measure, averaged with band masses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandWiener {
    pub m: f64,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct SliceExperiment {
    pub direction: UnitDirection,
    pub deltas: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    pub band_wiener: Option<BandWiener>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyAverage {
    pub t: f64,
    /// `Σ_bands mass · |ℱ(ν̂_w)(t)|²`.
    pub plug_in: f64,
    /// Same with each band's `|ℱ|²` corrected for the `1/n` bias of a mean of
    /// `n` unit phases. Bands with one point carry no information and are dropped.
    pub debiased: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceRow {
    pub delta: f64,
    pub bands: usize,
    /// Mass of bands left out of the debiased average.
    pub dropped_mass: f64,
    pub averages: Vec<FrequencyAverage>,
    pub band_wiener: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceReport {
    pub angle: f64,
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    pub rows: Vec<SliceRow>,
}

impl SliceReport {
    pub fn row(&self, delta: f64) -> Option<&SliceRow> {
        self.rows.iter().find(|r| r.delta == delta)
    }
}

struct Band {
    mass: f64,
    sq_mass: f64,
    start: usize,
    end: usize,
}

/// Samples `μ` and runs [`slice_report`] with bands anchored at `−R`.
pub fn slice_experiment(cfg: &IfsConfig, exp: &SliceExperiment) -> Result<SliceReport, MeasureError> {
    let em = sample_measure(cfg, exp.depth, exp.samples, exp.seed)?;
    slice_report(&em, exp, cfg.attractor_radius())
}

/// Bins `em` by `P_z` into bands `⌊(P_z x + anchor)/(2δ)⌋`, recentres every
/// band onto its slice line and averages `|ℱ|²` of the band measures with
/// weights equal to the band masses.
pub fn slice_report(
    em: &EmpiricalMeasure,
    exp: &SliceExperiment,
    anchor: f64,
) -> Result<SliceReport, MeasureError> {
    if exp.deltas.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(MeasureError::InvalidInput("band half-widths must be positive".into()));
    }
    let z = exp.direction.to_c64();
    let perp = exp.direction.perp();
    let mut rows = Vec::with_capacity(exp.deltas.len());
    for &delta in &exp.deltas {
        let mut keyed: Vec<(i64, f64, u32)> = em
            .points
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                let p = x.re * z.re + x.im * z.im;
                let s = x.re * perp.re + x.im * perp.im;
                (((p + anchor) / (2.0 * delta)).floor() as i64, s, i as u32)
            })
            .collect();
        keyed.par_sort_unstable_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        let mut bands = Vec::new();
        let mut start = 0;
        while start < keyed.len() {
            let key = keyed[start].0;
            let mut end = start;
            let (mut mass, mut sq) = (0.0, 0.0);
            while end < keyed.len() && keyed[end].0 == key {
                let w = em.weight(keyed[end].2 as usize);
                mass += w;
                sq += w * w;
                end += 1;
            }
            bands.push(Band {
                mass,
                sq_mass: sq,
                start,
                end,
            });
            start = end;
        }

        // Per band and frequency: (mass · |F|², mass · debiased |F|² or None).
        let per_band: Vec<Vec<(f64, Option<f64>)>> = bands
            .par_iter()
            .map(|b| {
                exp.frequencies
                    .iter()
                    .map(|&t| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &(_, s, i) in &keyed[b.start..b.end] {
                            acc += Complex64::from_polar(em.weight(i as usize), t * s);
                        }
                        let f2 = (acc / b.mass).norm_sqr();
                        // For i.i.d. phases E|F̂|² = |F|² + (1 − |F|²) Σw²/(Σw)².
                        let q = b.sq_mass / (b.mass * b.mass);
                        let debiased = if q < 1.0 - 1e-12 {
                            Some(b.mass * (f2 - q) / (1.0 - q))
                        } else {
                            None
                        };
                        (b.mass * f2, debiased)
                    })
                    .collect()
            })
            .collect();
        let dropped_mass: f64 = bands
            .iter()
            .filter(|b| b.sq_mass / (b.mass * b.mass) >= 1.0 - 1e-12)
            .map(|b| b.mass)
            .sum();
        let averages = exp
            .frequencies
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let mut plug = 0.0;
                let mut deb = 0.0;
                for band in &per_band {
                    plug += band[j].0;
                    if let Some(d) = band[j].1 {
                        deb += d;
                    }
                }
                let kept = 1.0 - dropped_mass;
                FrequencyAverage {
                    t,
                    plug_in: plug,
                    debiased: if kept > 0.0 { deb / kept } else { f64::NAN },
                }
            })
            .collect();

        let band_wiener = match exp.band_wiener {
            None => None,
            Some(bw) => {
                let mut total = 0.0;
                for b in &bands {
                    let slice = &keyed[b.start..b.end];
                    let diam = slice[slice.len() - 1].1 - slice[0].1;
                    let est = wiener_statistic(
                        |t| {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for &(_, s, i) in slice {
                                acc += Complex64::from_polar(em.weight(i as usize), t * s);
                            }
                            (acc / b.mass, 0.0)
                        },
                        bw.m,
                        bw.step,
                        diam,
                    )?;
                    total += b.mass * est.value;
                }
                Some(total)
            }
        };

        rows.push(SliceRow {
            delta,
            bands: bands.len(),
            dropped_mass,
            averages,
            band_wiener,
        });
    }
    Ok(SliceReport {
        angle: exp.direction.angle(),
        samples: em.len(),
        depth: em.meta.depth,
        seed: em.meta.seed,
        rows,
    })
}
