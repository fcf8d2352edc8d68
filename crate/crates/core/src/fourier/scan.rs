use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{FourierError, FourierEvaluator, FrequencySample};
use crate::algebraic::PisotContext;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    pub n_dirs: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub n_radii: usize,
}

impl ScanGrid {
    fn validate(&self) -> Result<(), FourierError> {
        if self.n_dirs == 0 || self.n_radii == 0 {
            return Err(FourierError::InvalidInput("scan grids must be nonempty".into()));
        }
        if !(self.r_min >= 1.0) || !self.r_max.is_finite() {
            return Err(FourierError::InvalidInput(format!(
                "need finite r_min ≥ 1, got r_min = {}, r_max = {}",
                self.r_min, self.r_max
            )));
        }
        if self.r_max < self.r_min {
            return Err(FourierError::InvalidInput(format!(
                "empty radius range: r_max = {} < r_min = {}",
                self.r_max, self.r_min
            )));
        }
        Ok(())
    }

    /// Radii spaced uniformly in `log r`.
    pub fn radii(&self) -> Vec<f64> {
        log_radii(self.r_min, self.r_max, self.n_radii)
    }
}

pub fn log_radii(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r_min];
    }
    let ratio = (r_max / r_min).ln();
    (0..n)
        .map(|i| r_min * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub angle: f64,
    pub best_radius: f64,
    pub sup_modulus: f64,
    pub sup_error: f64,
    /// Some evaluated `|ℱμ|` exceeds `c` after subtracting its error bound.
    pub exceeds_c: bool,
    /// Pisot indices `k` whose `η^k` was snapped into this cell.
    pub pisot_indices: Vec<i64>,
}

/// Angle of `η^k = e^{−ik arg θ}` in `[0, 2π)`.
pub fn pisot_direction_angle(ctx: &PisotContext, k: i64) -> f64 {
    let arg = ctx.theta().to_c64().arg();
    (-(k as f64) * arg).rem_euclid(TAU)
}

/// Indices `k ≥ 0` with `4π|θ|^k ∈ [r_min, r_max]`.
pub fn pisot_indices_in_range(ctx: &PisotContext, r_min: f64, r_max: f64) -> Vec<i64> {
    let m = ctx.theta().to_c64().norm();
    let mut out = Vec::new();
    let mut k = 0i64;
    loop {
        let r = 4.0 * PI * m.powi(k as i32);
        if r > r_max || !r.is_finite() {
            break;
        }
        if r >= r_min {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// The first `count` indices with `4π|θ|^k ≥ r_min`.
pub fn admissible_pisot_indices(ctx: &PisotContext, r_min: f64, count: usize) -> Vec<i64> {
    let m = ctx.theta().to_c64().norm();
    (0..)
        .filter(|&k| 4.0 * PI * m.powi(k as i32) >= r_min)
        .take(count)
        .collect()
}

fn better(a: &FrequencySample, b: &FrequencySample) -> bool {
    a.modulus() > b.modulus()
}

/// For each direction of a uniform angular grid, the largest `|ℱμ(r z)|` over
/// log-spaced radii, plus the special points `4π θ̄^k` for every `η^k` whose
/// nearest grid direction is this one.
pub fn scan_directions(
    ev: &FourierEvaluator,
    grid: ScanGrid,
    c: f64,
) -> Result<Vec<ScanRow>, FourierError> {
    grid.validate()?;
    let ctx = ev.config().context();
    let radii = grid.radii();
    let cell = TAU / grid.n_dirs as f64;
    let mut snapped: Vec<Vec<i64>> = vec![Vec::new(); grid.n_dirs];
    for k in pisot_indices_in_range(ctx, grid.r_min, grid.r_max) {
        let a = pisot_direction_angle(ctx, k);
        let i = ((a / cell).round() as usize) % grid.n_dirs;
        snapped[i].push(k);
    }
    let rows = (0..grid.n_dirs)
        .into_par_iter()
        .map(|i| {
            let angle = i as f64 * cell;
            let z = Complex64::from_polar(1.0, angle);
            let mut samples: Vec<(f64, FrequencySample)> = radii
                .iter()
                .map(|&r| (r, ev.transform(z * r)))
                .collect();
            for &k in &snapped[i] {
                let xi = ev.pisot_frequency(k);
                let r = 4.0 * PI * ctx.theta().to_c64().norm().powi(k as i32);
                samples.push((r, ev.transform_ball(&xi)));
            }
            let mut best = samples[0];
            for s in &samples[1..] {
                if better(&s.1, &best.1) {
                    best = *s;
                }
            }
            let exceeds_c = samples.iter().any(|(_, s)| s.modulus_lower() > c);
            ScanRow {
                angle,
                best_radius: best.0,
                sup_modulus: best.1.modulus(),
                sup_error: best.1.error,
                exceeds_c,
                pisot_indices: snapped[i].clone(),
            }
        })
        .collect();
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectionSup {
    pub k: i64,
    pub best_radius: f64,
    pub sup_modulus: f64,
    /// Certified lower bound on the sup over the sampled radii.
    pub sup_lower: f64,
}

/// Sup of `|ℱμ(r η^k)|` over log-spaced `r ∈ [r_min, r_max]` together with
/// the special radius `4π|θ|^k` when it lies in range.
pub fn sup_along_pisot_direction(
    ev: &FourierEvaluator,
    k: i64,
    r_min: f64,
    r_max: f64,
    n_radii: usize,
) -> Result<DirectionSup, FourierError> {
    ScanGrid {
        n_dirs: 1,
        r_min,
        r_max,
        n_radii,
    }
    .validate()?;
    let ctx = ev.config().context();
    let z = Complex64::from_polar(1.0, pisot_direction_angle(ctx, k));
    let mut samples: Vec<(f64, FrequencySample)> = log_radii(r_min, r_max, n_radii)
        .into_par_iter()
        .map(|r| (r, ev.transform(z * r)))
        .collect();
    let rk = 4.0 * PI * ctx.theta().to_c64().norm().powi(k as i32);
    if rk >= r_min && rk <= r_max {
        samples.push((rk, ev.transform_ball(&ev.pisot_frequency(k))));
    }
    let mut best = samples[0];
    for s in &samples[1..] {
        if better(&s.1, &best.1) {
            best = *s;
        }
    }
    let sup_lower = samples
        .iter()
        .map(|(_, s)| s.modulus_lower())
        .fold(0.0f64, f64::max);
    Ok(DirectionSup {
        k,
        best_radius: best.0,
        sup_modulus: best.1.modulus(),
        sup_lower,
    })
}

/// Fraction of `n_cells` equal angular cells that contain some `η^k`, `0 ≤ k ≤ k_max`.
pub fn orbit_cell_coverage(ctx: &PisotContext, n_cells: usize, k_max: i64) -> f64 {
    let arg = ctx.theta().to_c64().arg();
    let cell = TAU / n_cells as f64;
    let mut hit = vec![false; n_cells];
    for k in 0..=k_max {
        let a = (-(k as f64) * arg).rem_euclid(TAU);
        hit[((a / cell) as usize).min(n_cells - 1)] = true;
    }
    hit.iter().filter(|&&h| h).count() as f64 / n_cells as f64
}
