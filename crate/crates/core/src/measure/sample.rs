use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{MeasureError, UnitDirection, UNIT_TOLERANCE};
use crate::construction::IfsConfig;
use crate::hp::{up, CBall};

/// Points per random stream and per partial sum. Results do not depend on
/// the thread count because chunk boundaries and reduction order are fixed.
pub const CHUNK: usize = 65536;

const MAX_DEPTH: usize = 4096;

/// A finite word over the four maps. Digit `d` selects the translation
/// `[−a_1, −a_2, a_1, a_2][d]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitWord {
    digits: Vec<u8>,
}

impl DigitWord {
    pub fn new(digits: Vec<u8>) -> Result<Self, MeasureError> {
        if digits.iter().any(|&d| d > 3) {
            return Err(MeasureError::InvalidInput("digits must lie in 0..4".into()));
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// `Σ_{n<len} λ^n t_{d_n}` as a ball.
    pub fn center(&self, cfg: &IfsConfig) -> CBall {
        let lam = cfg.context().lambda();
        let t = cfg.map_translations();
        let mut acc = CBall::zero(cfg.context().precision());
        for &d in self.digits.iter().rev() {
            acc = &(&acc * lam) + &t[d as usize];
        }
        acc
    }

    /// Radius `|λ|^len R` of the cylinder around [`center`](Self::center).
    pub fn radius(&self, cfg: &IfsConfig) -> f64 {
        up(cfg.context().lambda().abs_upper().powi(self.digits.len() as i32) * cfg.attractor_radius())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Weights {
    Uniform,
    Explicit(Vec<f64>),
}

impl Weights {
    fn check(&self, len: usize) -> Result<(), MeasureError> {
        if let Weights::Explicit(w) = self {
            if w.len() != len {
                return Err(MeasureError::InvalidInput(format!(
                    "{} weights for {len} points",
                    w.len()
                )));
            }
            if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(MeasureError::InvalidInput("weights must be nonnegative".into()));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(MeasureError::InvalidInput(format!("weights sum to {total}")));
            }
        }
        Ok(())
    }

    fn get(&self, i: usize, len: usize) -> f64 {
        match self {
            Weights::Uniform => 1.0 / len as f64,
            Weights::Explicit(w) => w[i],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleMeta {
    pub depth: usize,
    pub seed: u64,
    /// Bound on the distance of each point from an exact sample of `μ`.
    pub truncation: f64,
}

/// A weighted point cloud in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    pub points: Vec<Complex64>,
    pub weights: Weights,
    pub meta: SampleMeta,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Complex64>, weights: Weights, meta: SampleMeta) -> Result<Self, MeasureError> {
        if points.is_empty() {
            return Err(MeasureError::InvalidInput("no points".into()));
        }
        weights.check(points.len())?;
        Ok(Self {
            points,
            weights,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.get(i, self.points.len())
    }
}

/// A weighted point cloud on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct LineMeasure {
    pub points: Vec<f64>,
    pub weights: Weights,
}

impl LineMeasure {
    pub fn new(points: Vec<f64>, weights: Weights) -> Result<Self, MeasureError> {
        if points.is_empty() {
            return Err(MeasureError::InvalidInput("no points".into()));
        }
        weights.check(points.len())?;
        Ok(Self { points, weights })
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.get(i, self.points.len())
    }

    /// `Σ p_i e^{i t x_i}`, summed in fixed chunks.
    pub fn transform(&self, t: f64) -> Complex64 {
        let n = self.points.len();
        let partial: Vec<Complex64> = self
            .points
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, pts)| {
                let base = c * CHUNK;
                pts.iter()
                    .enumerate()
                    .map(|(i, &x)| Complex64::from_polar(self.weights.get(base + i, n), t * x))
                    .sum()
            })
            .collect();
        partial.into_iter().sum()
    }

    pub fn support_diameter(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        hi - lo
    }
}

/// Draws `count` truncated expansions `Σ_{n<depth} λ^n X_n` with i.i.d.
/// uniform `X_n ∈ {±a_1, ±a_2}`.
///
/// Chunk `c` of [`CHUNK`] points uses ChaCha8 seeded by `seed` on stream `c`,
/// two bits per digit.
pub fn sample_measure(
    cfg: &IfsConfig,
    depth: usize,
    count: usize,
    seed: u64,
) -> Result<EmpiricalMeasure, MeasureError> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(MeasureError::InvalidInput(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    if count == 0 {
        return Err(MeasureError::InvalidInput("count must be positive".into()));
    }
    let lam = cfg.context().lambda();
    let translations = cfg.map_translations();
    let mut table = Vec::with_capacity(depth);
    let mut pow = CBall::one(cfg.context().precision());
    for _ in 0..depth {
        let row: [Complex64; 4] = std::array::from_fn(|d| (&pow * &translations[d]).to_c64());
        table.push(row);
        pow = &pow * lam;
    }
    let words = depth.div_ceil(32);
    let mut points = vec![Complex64::new(0.0, 0.0); count];
    points
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, out)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut bits = vec![0u64; words];
            for p in out.iter_mut() {
                for b in bits.iter_mut() {
                    *b = rng.next_u64();
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for n in (0..depth).rev() {
                    let d = (bits[n / 32] >> (2 * (n % 32))) & 3;
                    acc += table[n][d as usize];
                }
                *p = acc;
            }
        });
    let r = cfg.attractor_radius();
    let tail = lam.abs_upper().powi(depth as i32) * r;
    let rounding = (depth as f64 + 2.0) * 4.0 * f64::EPSILON * r;
    Ok(EmpiricalMeasure {
        points,
        weights: Weights::Uniform,
        meta: SampleMeta {
            depth,
            seed,
            truncation: up(tail + rounding),
        },
    })
}

/// `Σ p_i e^{i⟨x_i, ξ⟩}` with `⟨x, ξ⟩ = Re(x ξ̄)`.
pub fn empirical_transform(em: &EmpiricalMeasure, xi: Complex64) -> Complex64 {
    empirical_transform_many(em, &[xi])[0]
}

/// [`empirical_transform`] at several frequencies in one pass over the points.
pub fn empirical_transform_many(em: &EmpiricalMeasure, xis: &[Complex64]) -> Vec<Complex64> {
    let n = em.points.len();
    let partial: Vec<Vec<Complex64>> = em
        .points
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, pts)| {
            let base = c * CHUNK;
            let mut acc = vec![Complex64::new(0.0, 0.0); xis.len()];
            for (i, x) in pts.iter().enumerate() {
                let w = em.weights.get(base + i, n);
                for (a, xi) in acc.iter_mut().zip(xis) {
                    *a += Complex64::from_polar(w, x.re * xi.re + x.im * xi.im);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Complex64::new(0.0, 0.0); xis.len()];
    for p in partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// Pushes the measure forward by `P_z w = ⟨w, z⟩ = Re(w z̄)`.
pub fn project(em: &EmpiricalMeasure, z: Complex64) -> Result<LineMeasure, MeasureError> {
    if !((z.norm() - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(MeasureError::InvalidInput(format!(
            "projection direction {z} is not a unit vector"
        )));
    }
    let points = em
        .points
        .par_iter()
        .map(|w| w.re * z.re + w.im * z.im)
        .collect();
    Ok(LineMeasure {
        points,
        weights: em.weights.clone(),
    })
}

impl UnitDirection {
    /// [`project`] along this direction.
    pub fn project(&self, em: &EmpiricalMeasure) -> Result<LineMeasure, MeasureError> {
        project(em, self.to_c64())
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of `points` and the
/// uniform law on `[lo, hi]`, unweighted.
pub fn ks_distance_to_uniform(points: &[f64], lo: f64, hi: f64) -> f64 {
    let mut xs: Vec<f64> = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}
