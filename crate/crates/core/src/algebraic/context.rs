use num_bigint::BigInt;
use serde::Serialize;

use super::{find_roots, AlgebraError, MonicIntPolynomial, PowerSumSequence, RootBall};
use crate::hp::{up, CBall, Precision, RBall};

/// The dominant root θ of a monic integer polynomial together with everything
/// downstream code needs: all conjugates, λ = 1/θ, and decay constants `C`, `ρ`
/// such that `dist(2 Re θ^n, Z) ≤ C ρ^{|n|}` whenever θ is a complex Pisot number.
#[derive(Clone, Debug)]
pub struct PisotContext {
    poly: MonicIntPolynomial,
    prec: Precision,
    roots: Vec<RootBall>,
    theta: usize,
    theta_conj: Option<usize>,
    lambda: CBall,
    rho: f64,
    decay_constant: f64,
    sums: PowerSumSequence,
}

impl PisotContext {
    /// Finds roots at `precision_digits` and picks θ as the root of largest
    /// modulus (upper half plane on ties). Pisot-ness is not checked here; see
    /// [`verify_complex_pisot`].
    pub fn new(poly: MonicIntPolynomial, precision_digits: u32) -> Result<Self, AlgebraError> {
        let roots = find_roots(&poly, precision_digits)?;
        let prec = Precision::from_digits(precision_digits);
        // Roots are sorted by decreasing modulus, upper half plane first.
        let theta = 0;
        let theta_conj = if roots[theta].is_real {
            None
        } else {
            let target = roots[theta].value.conj();
            roots
                .iter()
                .position(|r| r.value.same_center(&target))
        };
        let lambda = roots[theta].value.inv().ok_or(AlgebraError::PrecisionInsufficient {
            digits: precision_digits,
            what: "θ cannot be separated from zero".into(),
        })?;
        let max_rad = roots.iter().map(|r| r.radius()).fold(0.0f64, f64::max);
        let others_max = roots
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != theta && Some(*i) != theta_conj)
            .map(|(_, r)| r.value.abs_upper())
            .fold(0.0f64, f64::max);
        let rho = up(others_max.max(lambda.abs_upper()) + max_rad);
        let d = poly.degree();
        let decay_constant = 2.0 * (d.saturating_sub(2).max(1)) as f64;
        let sums = PowerSumSequence::new(&poly);
        Ok(Self {
            poly,
            prec,
            roots,
            theta,
            theta_conj,
            lambda,
            rho,
            decay_constant,
            sums,
        })
    }

    pub fn polynomial(&self) -> &MonicIntPolynomial {
        &self.poly
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn precision_digits(&self) -> u32 {
        self.prec.digits()
    }

    pub fn roots(&self) -> &[RootBall] {
        &self.roots
    }

    pub fn theta(&self) -> &CBall {
        &self.roots[self.theta].value
    }

    pub fn theta_is_real(&self) -> bool {
        self.roots[self.theta].is_real
    }

    pub fn theta_conj(&self) -> Option<&CBall> {
        self.theta_conj.map(|i| &self.roots[i].value)
    }

    /// Roots other than θ and θ̄.
    pub fn other_conjugates(&self) -> impl Iterator<Item = &RootBall> {
        self.roots
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.theta && Some(*i) != self.theta_conj)
            .map(|(_, r)| r)
    }

    pub fn lambda(&self) -> &CBall {
        &self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The constant `C` in `C ρ^{|n|}`.
    pub fn decay_constant(&self) -> f64 {
        self.decay_constant
    }

    pub fn power_sums(&self) -> &PowerSumSequence {
        &self.sums
    }

    pub fn theta_abs(&self) -> RBall {
        self.theta()
            .norm_sqr()
            .sqrt()
            .unwrap_or_else(|| RBall::zero(self.prec).with_added_rad(self.theta().abs_upper()))
    }

    /// θ^n for any integer n (λ^{-n} when n < 0).
    pub fn theta_pow(&self, n: i64) -> CBall {
        if n >= 0 {
            self.theta().powi(n as u64)
        } else {
            self.lambda.powi(n.unsigned_abs())
        }
    }

    /// `2 Re θ^n` split into its nearest integer and a small remainder.
    ///
    /// For `n ≥ 0` and non-real θ the integer part is read off the exact power
    /// sum: `2 Re θ^n = s_n − Σ_others root^n`, so only the tiny conjugate sum
    /// is evaluated numerically. For `n < 0` the value `2 Re λ^{|n|}` is itself
    /// small and is computed directly.
    pub fn two_re_power(&self, n: i64) -> Result<PowerReduction, AlgebraError> {
        let remainder_and_nearest = if n >= 0 && !self.theta_is_real() {
            let s = self.sums.power_sum(n)?;
            let mut others = CBall::zero(self.prec);
            for r in self.other_conjugates() {
                others = &others + &r.value.powi(n as u64);
            }
            let others_re = others.re();
            let q = others_re.round_mid();
            let remainder = &RBall::from_int(q.clone(), self.prec) - &others_re;
            (remainder, s - q)
        } else {
            let two_re = self.theta_pow(n).re().mul_int(&BigInt::from(2));
            let (q, r) = two_re.split_integer();
            (r, q)
        };
        let (remainder, nearest) = remainder_and_nearest;
        if remainder.abs_upper() >= 0.5 {
            return Err(AlgebraError::PrecisionInsufficient {
                digits: self.prec.digits(),
                what: format!("2 Re θ^{n} not separated from a half-integer"),
            });
        }
        Ok(PowerReduction {
            n,
            nearest,
            remainder,
            bound: self.decay_constant * self.rho.powi(n.unsigned_abs() as i32),
        })
    }
}

/// `2 Re θ^n = nearest + remainder` with `|remainder| < 1/2` certified.
#[derive(Clone, Debug)]
pub struct PowerReduction {
    pub n: i64,
    pub nearest: BigInt,
    pub remainder: RBall,
    /// `C ρ^{|n|}` from the owning context.
    pub bound: f64,
}

impl PowerReduction {
    pub fn distance(&self) -> f64 {
        self.remainder.mid_f64().abs()
    }

    pub fn distance_upper(&self) -> f64 {
        self.remainder.abs_upper()
    }

    pub fn within_bound(&self) -> bool {
        self.distance_upper() <= self.bound
    }
}

/// Distance of `2 Re θ^n` from the integers and the nearest integer.
pub fn dist_2re_theta_pow_to_z(
    ctx: &PisotContext,
    n: i64,
) -> Result<(f64, BigInt), AlgebraError> {
    let r = ctx.two_re_power(n)?;
    Ok((r.distance(), r.nearest))
}

#[derive(Clone, Debug, Serialize)]
pub struct PisotCertificate {
    pub is_complex_pisot: bool,
    /// `|Im θ| − radius`; negative or absent when θ is real.
    pub theta_im_margin: Option<f64>,
    /// `|θ| − 1 − radius`.
    pub theta_modulus_margin: f64,
    /// `1 − |root| − radius` for every root other than θ, θ̄.
    pub conjugate_margins: Vec<f64>,
    pub failure: Option<String>,
}

/// Decides whether θ is a complex Pisot number: θ non-real, |θ| > 1, and
/// every conjugate other than θ̄ inside the unit disk.
pub fn verify_complex_pisot(ctx: &PisotContext) -> Result<PisotCertificate, AlgebraError> {
    let digits = ctx.precision_digits();
    let undecided = |what: String| AlgebraError::PrecisionInsufficient { digits, what };
    let theta = ctx.theta();
    let rad = theta.rad();
    let theta_modulus_margin = theta.to_c64().norm() - 1.0 - rad;
    let conjugate_margins: Vec<f64> = ctx
        .other_conjugates()
        .map(|r| 1.0 - r.center().norm() - r.radius())
        .collect();
    let mut failure = None;

    let theta_im_margin = if ctx.theta_is_real() {
        failure = Some("θ is real".to_string());
        None
    } else {
        let m = theta.im().abs_lower();
        if m <= 0.0 {
            return Err(undecided("Im θ vs 0".into()));
        }
        Some(theta.to_c64().im.abs() - rad)
    };

    if failure.is_none() {
        if theta.abs_lower() > 1.0 {
        } else if theta.abs_upper() < 1.0 {
            failure = Some("|θ| < 1".into());
        } else {
            return Err(undecided("|θ| vs 1".into()));
        }
    }
    if failure.is_none() {
        for r in ctx.other_conjugates() {
            if r.value.abs_upper() < 1.0 {
                continue;
            }
            if r.value.abs_lower() > 1.0 {
                failure = Some(format!("conjugate {} lies outside the unit disk", r.center()));
                break;
            }
            return Err(undecided(format!("|{}| vs 1", r.center())));
        }
    }
    Ok(PisotCertificate {
        is_complex_pisot: failure.is_none(),
        theta_im_margin,
        theta_modulus_margin,
        conjugate_margins,
        failure,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DenseRotationStatus {
    /// Degree 3 and no rational root: arg θ is not a rational multiple of π.
    Holds,
    /// A rational (hence integer) root exists, so the cubic is reducible.
    Reducible { root: i64 },
    /// No criterion for this degree; the probe below is only a heuristic.
    Inapplicable { degree: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ImaginaryProbe {
    pub n_probe: u32,
    /// Certified lower bound on `min_{1≤n≤N} |Im θ^n|`.
    pub min_abs_im: f64,
    pub argmin: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseRotationCertificate {
    pub status: DenseRotationStatus,
    pub probe: Option<ImaginaryProbe>,
}

impl DenseRotationCertificate {
    pub fn holds(&self) -> bool {
        self.status == DenseRotationStatus::Holds
    }
}

/// Irreducibility test for cubics (rational root test) plus a numeric probe
/// that `Im θ^n ≠ 0` for `1 ≤ n ≤ n_probe`.
pub fn verify_dense_rotation_criterion(
    ctx: &PisotContext,
    n_probe: u32,
) -> Result<DenseRotationCertificate, AlgebraError> {
    let poly = ctx.polynomial();
    let d = poly.degree();
    if d == 3 {
        if let Some(&root) = poly.integer_roots().first() {
            return Ok(DenseRotationCertificate {
                status: DenseRotationStatus::Reducible { root },
                probe: None,
            });
        }
    }
    if ctx.theta_is_real() {
        return Err(AlgebraError::RealDominantRoot);
    }
    let mut min_abs_im = f64::INFINITY;
    let mut argmin = 0;
    let mut p = CBall::one(ctx.precision());
    for n in 1..=n_probe {
        p = &p * ctx.theta();
        let lo = p.im().abs_lower();
        if lo <= 0.0 {
            return Err(AlgebraError::PrecisionInsufficient {
                digits: ctx.precision_digits(),
                what: format!("Im θ^{n} vs 0"),
            });
        }
        if lo < min_abs_im {
            min_abs_im = lo;
            argmin = n;
        }
    }
    let status = if d == 3 {
        DenseRotationStatus::Holds
    } else {
        DenseRotationStatus::Inapplicable { degree: d }
    };
    Ok(DenseRotationCertificate {
        status,
        probe: Some(ImaginaryProbe {
            n_probe,
            min_abs_im,
            argmin,
        }),
    })
}
