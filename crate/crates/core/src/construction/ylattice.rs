use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::algebraic::PisotContext;
use crate::hp::CBall;

/// An element `k λ^l` of the set 𝒴.
#[derive(Clone, Debug)]
pub struct YElement {
    k: u64,
    l: u32,
    value: CBall,
}

impl YElement {
    pub fn new(ctx: &PisotContext, k: u64, l: u32) -> Self {
        let value = ctx.lambda().powi(l as u64).mul_int(&BigInt::from(k));
        Self { k, l, value }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn value(&self) -> &CBall {
        &self.value
    }

    pub fn to_c64(&self) -> Complex64 {
        self.value.to_c64()
    }
}

/// Budget for the search in [`approximate_in_y`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCaps {
    pub max_l: u32,
    pub max_k: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self {
            max_l: 500,
            max_k: 1_000_000_000,
        }
    }
}

/// Finds `k λ^l` within `eps` of `target`, scanning `l = 0, 1, ...` and for
/// each `l` the two radial candidates `k = ⌊|t|/|λ^l|⌋` and `k + 1`.
///
/// Once `|λ|^l < eps/3` and the direction of `λ^l` is within `eps/(3|t|)` of
/// the direction of `t`, the floor candidate is within `eps`; density of
/// `{arg λ^l}` guarantees such an `l` exists, so the scan reaches it unless a
/// cap intervenes. Accepting any earlier candidate whose certified error is
/// below `eps` keeps the result small and still correct. The first hit in
/// order of `l`, then `k`, is returned.
pub fn approximate_in_y(
    ctx: &PisotContext,
    target: Complex64,
    eps: f64,
    caps: SearchCaps,
) -> Result<YElement, ConstructionError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(ConstructionError::InvalidInput(format!(
            "eps must be positive and finite, got {eps}"
        )));
    }
    if !target.re.is_finite() || !target.im.is_finite() {
        return Err(ConstructionError::InvalidInput("target is not finite".into()));
    }
    let prec = ctx.precision();
    if target == Complex64::new(0.0, 0.0) {
        return Ok(YElement {
            k: 0,
            l: 0,
            value: CBall::zero(prec),
        });
    }
    let t = CBall::from_c64(target, prec);
    let t_abs = target.norm();
    let mut lam_l = CBall::one(prec);
    let mut best: Option<(u64, u32, f64)> = None;
    for l in 0..=caps.max_l {
        if l > 0 {
            lam_l = &lam_l * ctx.lambda();
        }
        let k0 = (t_abs / lam_l.to_c64().norm()).floor();
        if k0 > caps.max_k as f64 {
            break;
        }
        let k0 = k0 as u64;
        for k in [k0, k0 + 1] {
            if k == 0 || k > caps.max_k {
                continue;
            }
            let cand = lam_l.mul_int(&BigInt::from(k));
            let err = (&cand - &t).abs_upper();
            if err < eps {
                return Ok(YElement { k, l, value: cand });
            }
            if best.is_none_or(|(_, _, e)| err < e) {
                best = Some((k, l, err));
            }
        }
    }
    let (best_k, best_l, best_error) = best.unwrap_or((0, 0, f64::INFINITY));
    Err(ConstructionError::SearchExhausted {
        best_k,
        best_l,
        best_error,
        eps,
    })
}
