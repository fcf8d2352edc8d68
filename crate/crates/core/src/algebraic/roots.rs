use num_complex::Complex64;

use super::{AlgebraError, MonicIntPolynomial};
use crate::hp::{up, CBall, Precision};

/// A root enclosure: every point of the disk is within `radius()` of exactly one root.
#[derive(Clone, Debug)]
pub struct RootBall {
    pub value: CBall,
    pub is_real: bool,
}

impl RootBall {
    pub fn center(&self) -> Complex64 {
        self.value.to_c64()
    }

    pub fn radius(&self) -> f64 {
        self.value.rad()
    }
}

fn aberth(poly: &MonicIntPolynomial) -> Vec<Complex64> {
    let d = poly.degree();
    let c = poly.coefficients();
    // Fujiwara bound on root moduli.
    let bound = (1..=d)
        .map(|i| {
            let a = c[d - i].abs() as f64;
            if i == d {
                (a / 2.0).powf(1.0 / i as f64)
            } else {
                a.powf(1.0 / i as f64)
            }
        })
        .fold(0.0f64, f64::max)
        * 2.0;
    let r0 = bound.max(1.0);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for k in 0..d {
            let (p, dp) = poly.eval_with_derivative_f64(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| 1.0 / (z[k] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                let bump = Complex64::new(1e-3, 1e-3) * (1.0 + z[k].norm());
                z[k] += bump;
                max_step = f64::INFINITY;
                continue;
            }
            z[k] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

fn newton(poly: &MonicIntPolynomial, start: CBall) -> CBall {
    let prec = start.precision();
    let tol = crate::hp::ldexp(1.0, -(prec.bits() as i64) + 8);
    let mut z = start;
    let mut small_steps = 0;
    for _ in 0..200 {
        let (p, dp) = poly.eval_with_derivative_ball(&z);
        let Some(inv) = dp.mid_only().inv() else {
            break;
        };
        let step = &p.mid_only() * &inv;
        z = (&z - &step).mid_only();
        if step.mid_abs_upper() <= tol * (1.0 + z.mid_abs_upper()) {
            small_steps += 1;
            if small_steps >= 2 {
                break;
            }
        }
    }
    z
}

/// Certified roots of a square-free monic integer polynomial.
///
/// Each returned disk has radius at most `10^-precision_digits`, the disks are
/// pairwise disjoint, and each contains exactly one root. Non-real roots come
/// in exactly mirrored conjugate pairs. Order: decreasing modulus, then
/// decreasing imaginary part, then decreasing real part.
pub fn find_roots(
    poly: &MonicIntPolynomial,
    precision_digits: u32,
) -> Result<Vec<RootBall>, AlgebraError> {
    if precision_digits == 0 || precision_digits > Precision::max_digits() {
        return Err(AlgebraError::InvalidPrecision(precision_digits));
    }
    if !poly.is_square_free() {
        return Err(AlgebraError::NotSquareFree);
    }
    let prec = Precision::from_digits(precision_digits);
    let d = poly.degree();
    let approx = aberth(poly);

    let mut upper = Vec::new();
    let mut lower = 0usize;
    let mut real = Vec::new();
    for z in &approx {
        let scale = 1e-6 * z.norm().max(1.0);
        if z.im.abs() <= scale {
            real.push(z.re);
        } else if z.im > 0.0 {
            upper.push(*z);
        } else {
            lower += 1;
        }
    }
    if upper.len() != lower || real.len() + 2 * upper.len() != d {
        return Err(AlgebraError::NonConvergence {
            target: prec.target(),
            achieved: f64::INFINITY,
        });
    }

    let mut centers: Vec<(CBall, bool)> = Vec::with_capacity(d);
    for z in upper {
        let r = newton(poly, CBall::from_c64(z, prec));
        centers.push((r.conj(), false));
        centers.push((r, false));
    }
    for x in real {
        let r = newton(poly, CBall::from_c64(Complex64::new(x, 0.0), prec));
        centers.push((r, true));
    }

    let mut radii = vec![0.0f64; d];
    for i in 0..d {
        let (p, _) = poly.eval_with_derivative_ball(&centers[i].0);
        let mut denom = CBall::one(prec);
        for j in 0..d {
            if j != i {
                denom = &denom * &(&centers[i].0 - &centers[j].0);
            }
        }
        let lo = denom.abs_lower();
        radii[i] = if lo > 0.0 {
            up(d as f64 * up(p.abs_upper() / lo))
        } else {
            f64::INFINITY
        };
    }
    let achieved = radii.iter().cloned().fold(0.0f64, f64::max);
    let mut disjoint = true;
    for i in 0..d {
        for j in i + 1..d {
            let gap = (&centers[i].0 - &centers[j].0).abs_lower();
            if gap <= up(radii[i] + radii[j]) {
                disjoint = false;
            }
        }
    }
    if !disjoint || achieved > prec.target() {
        return Err(AlgebraError::NonConvergence {
            target: prec.target(),
            achieved,
        });
    }

    let mut roots: Vec<RootBall> = centers
        .into_iter()
        .zip(radii)
        .map(|((c, is_real), r)| RootBall {
            value: c.with_added_rad(r),
            is_real,
        })
        .collect();
    roots.sort_by(|a, b| {
        let (za, zb) = (a.center(), b.center());
        zb.norm()
            .total_cmp(&za.norm())
            .then(zb.im.total_cmp(&za.im))
            .then(zb.re.total_cmp(&za.re))
    });
    Ok(roots)
}
