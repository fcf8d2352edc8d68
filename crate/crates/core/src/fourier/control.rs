//! Uniform measure on the unit disk: a control whose transform decays.

use std::f64::consts::PI;

use super::scan::log_radii;

const ASYMPTOTIC_FROM: f64 = 30.0;

/// Bessel function `J_1`.
///
/// Below 30 it is the trapezoid rule for `(1/2π)∫ cos(τ − x sin τ) dτ` over a
/// full period, which converges geometrically once the node count exceeds `x`.
/// Above 30 it is Hankel's asymptotic expansion.
pub fn bessel_j1(x: f64) -> f64 {
    if x < 0.0 {
        return -bessel_j1(-x);
    }
    if x < ASYMPTOTIC_FROM {
        let n = 2 * (x.ceil() as usize) + 64;
        let h = 2.0 * PI / n as f64;
        let s: f64 = (0..n)
            .map(|k| {
                let t = k as f64 * h;
                (t - x * t.sin()).cos()
            })
            .sum();
        return s / n as f64;
    }
    let mu = 4.0;
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    for k in 1..20 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z);
        if term.abs() < 1e-17 {
            break;
        }
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `ℱ` of the normalized uniform measure on the unit disk at `|ξ| = r`.
pub fn uniform_disk_transform(r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        2.0 * bessel_j1(r) / r
    }
}

/// Largest `|2J_1(r)/r|` over log-spaced `r ∈ [r_min, r_max]`.
pub fn uniform_disk_sup(r_min: f64, r_max: f64, n_radii: usize) -> f64 {
    log_radii(r_min, r_max, n_radii)
        .into_iter()
        .map(|r| uniform_disk_transform(r).abs())
        .fold(0.0, f64::max)
}
