use num_bigint::BigInt;
use serde::Serialize;

use super::{FourierError, FourierEvaluator};
use crate::hp::{up, RBall};

/// One factor of the bilateral product at `ξ = 4π θ̄^N`:
/// `b_n = ½(cos 4πk_1 Re θ^{n−l_1} + cos 4πk_2 Re θ^{n−l_2})`.
///
/// With `U_j = k_j · 2Re θ^{n−l_j} mod 1` this equals
/// `cos π(U_1+U_2) · cos π(U_1−U_2)`, which vanishes only when `U_1 ± U_2`
/// is a half-integer. `margin` is the certified distance of both from `Z + ½`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BFactor {
    pub n: i64,
    pub value: f64,
    pub product_form: f64,
    pub margin: f64,
    /// Certified lower bound on `|b_n|`.
    pub lower_bound: f64,
    /// Bound on `|value − b_n|`.
    pub error: f64,
}

fn distance_to_half_integers(s: &RBall) -> (f64, f64) {
    let shifted = s - &RBall::half(s.precision());
    let (_, r) = shifted.split_integer();
    (r.mid_f64().abs(), r.abs_lower())
}

/// Builds `b_n` from reduced arguments `U_1, U_2` (each known mod 1).
pub fn factor_from_args(n: i64, u1: &RBall, u2: &RBall) -> Result<BFactor, FourierError> {
    let (_, plus_lo) = distance_to_half_integers(&(u1 + u2));
    let (_, minus_lo) = distance_to_half_integers(&(u1 - u2));
    let margin = plus_lo.min(minus_lo);
    if margin <= 0.0 {
        return Err(FourierError::MarginUndecided { n, margin });
    }
    let (a, b) = (u1.mid_f64(), u2.mid_f64());
    let tau = 2.0 * std::f64::consts::PI;
    let value = 0.5 * ((tau * a).cos() + (tau * b).cos());
    let pi = std::f64::consts::PI;
    let product_form = (pi * (a + b)).cos() * (pi * (a - b)).cos();
    let lower_bound = (pi * plus_lo.min(0.5)).sin()
        * (pi * minus_lo.min(0.5)).sin()
        * (1.0 - 8.0 * f64::EPSILON);
    let error = up(pi * (u1.rad() + u2.rad()) + 4.0 * f64::EPSILON);
    Ok(BFactor {
        n,
        value,
        product_form,
        margin,
        lower_bound,
        error,
    })
}

/// Rigorous lower bound `c` on `|ℱμ(4π θ̄^N)|` over all `N ≥ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct LowerBound {
    pub c: f64,
    pub m_cut: u32,
    pub c0: f64,
    pub rho: f64,
    /// `∏_{|n|<M} |b_n|` bounded below.
    pub explicit_product: f64,
    /// `∏_{n≥M} (1 − C_0 ρ^n)` bounded below.
    pub tail_product: f64,
    pub factors: Vec<BFactor>,
}

impl FourierEvaluator {
    /// `b_n` with arguments reduced through exact power sums.
    pub fn b_factor(&self, n: i64) -> Result<BFactor, FourierError> {
        let ctx = self.config().context();
        let c0 = ctx.polynomial().constant_term();
        if c0.abs() != 1 {
            return Err(FourierError::Domain(format!(
                "b_n needs constant term ±1, got {c0}"
            )));
        }
        let reduce = |k: u64, l: u32| -> Result<RBall, FourierError> {
            let red = ctx.two_re_power(n - l as i64)?;
            let (_, u) = red.remainder.mul_int(&BigInt::from(k)).split_integer();
            Ok(u)
        };
        let u1 = reduce(self.config().a1().k(), self.config().a1().l())?;
        let u2 = reduce(self.config().a2().k(), self.config().a2().l())?;
        factor_from_args(n, &u1, &u2)
    }

    /// `∏_{n ≥ M'} (1 − C_0 ρ^n)` bounded below, using `log(1−x) ≥ −2x` once the
    /// terms are small.
    fn forward_tail(&self, start: u32) -> f64 {
        let rho = self.config().context().rho();
        let mut x = up(self.c0() * rho.powi(start as i32));
        let mut prod = 1.0f64;
        while x >= 1e-6 {
            prod *= (1.0 - x) * (1.0 - 2.0 * f64::EPSILON);
            x = up(x * rho);
        }
        let rest = (-2.0 * up(x / (1.0 - rho))).exp() * (1.0 - 4.0 * f64::EPSILON);
        prod * rest
    }

    pub fn certify_lower_bound(&self) -> Result<LowerBound, FourierError> {
        self.certify_lower_bound_with_extra_cut(0)
    }

    /// As [`certify_lower_bound`](Self::certify_lower_bound) with `extra` more
    /// factors on each side treated explicitly.
    pub fn certify_lower_bound_with_extra_cut(&self, extra: u32) -> Result<LowerBound, FourierError> {
        let m = self.m_cut() + extra;
        let mut factors = Vec::with_capacity(2 * m as usize);
        let mut explicit = 1.0f64;
        for n in -(m as i64 - 1)..=(m as i64 - 1) {
            let b = self.b_factor(n)?;
            explicit *= b.lower_bound;
            factors.push(b);
        }
        let tail = self.forward_tail(m);
        let slack = 1.0 - 4.0 * (2.0 * m as f64 + 10.0) * f64::EPSILON;
        let c = explicit * tail * tail * slack;
        if !(c > 0.0) {
            return Err(FourierError::MarginUndecided {
                n: 0,
                margin: c,
            });
        }
        Ok(LowerBound {
            c,
            m_cut: m,
            c0: self.c0(),
            rho: self.config().context().rho(),
            explicit_product: explicit,
            tail_product: tail,
            factors,
        })
    }

    /// `∏_{n=−∞}^{N} b_n`, which equals `ℱμ(4π θ̄^N)`. The left tail is cut
    /// where `Σ C_0 ρ^{|n|}` drops below `tail_tol`.
    pub fn bilateral_product(&self, n_max: i64) -> Result<(f64, f64), FourierError> {
        let rho = self.config().context().rho();
        let mut k = self.m_cut() as i64;
        while self.c0() * rho.powi(k as i32 + 1) / (1.0 - rho) >= self.tail_tol() {
            k += 1;
        }
        let left_tail = up(self.c0() * rho.powi(k as i32 + 1) / (1.0 - rho));
        let mut prod = 1.0f64;
        let mut prod_hi = 1.0f64;
        let mut count = 0.0;
        for n in -k..=n_max {
            let b = self.b_factor(n)?;
            prod *= b.value;
            prod_hi = up(prod_hi * (b.value.abs() + b.error));
            count += 1.0;
        }
        let p = prod.abs();
        let err = up((prod_hi - p).max(0.0) + count * 2.0 * f64::EPSILON * p);
        Ok((prod, up(err + (p + err) * left_tail)))
    }
}

/// Free-function form of [`FourierEvaluator::b_factor`].
pub fn b_n(ev: &FourierEvaluator, n: i64) -> Result<BFactor, FourierError> {
    ev.b_factor(n)
}

pub fn certify_lower_bound(ev: &FourierEvaluator) -> Result<LowerBound, FourierError> {
    ev.certify_lower_bound()
}
