use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConstructionError, YElement};
use crate::algebraic::PisotContext;
use crate::hp::{up, CBall};

/// Deepest level the separation certifier enumerates (4^7 cylinders).
pub const MAX_SSC_DEPTH: u32 = 7;

/// Strong separation witnessed at `depth`: every pair of depth-`depth`
/// cylinder balls is at least `min_gap` apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub depth: u32,
    pub min_gap: f64,
}

/// The system `{z ↦ λz + (−1)^k a_j : k, j ∈ {1, 2}}` with `a_j = k_j λ^{l_j}`.
#[derive(Clone, Debug)]
pub struct IfsConfig {
    ctx: Arc<PisotContext>,
    a: [YElement; 2],
    radius: f64,
    ssc: Option<SeparationCertificate>,
}

/// Radius of a ball around 0 mapped into itself by all four maps.
fn invariant_radius(lambda: &CBall, a: [&CBall; 2]) -> f64 {
    let amax = a[0].abs_upper().max(a[1].abs_upper());
    let shrink = 1.0 - lambda.abs_upper();
    up(amax / (shrink * (1.0 - 4.0 * f64::EPSILON)))
}

impl IfsConfig {
    pub fn new(
        ctx: Arc<PisotContext>,
        (k1, l1): (u64, u32),
        (k2, l2): (u64, u32),
    ) -> Result<Self, ConstructionError> {
        if k1 == 0 || k2 == 0 {
            return Err(ConstructionError::InvalidInput(
                "translations need k ≥ 1".into(),
            ));
        }
        if ctx.lambda().abs_upper() >= 1.0 {
            return Err(ConstructionError::NotEligible(
                "|λ| < 1 is required for a contraction".into(),
            ));
        }
        let a = [YElement::new(&ctx, k1, l1), YElement::new(&ctx, k2, l2)];
        let radius = invariant_radius(ctx.lambda(), [a[0].value(), a[1].value()]);
        Ok(Self {
            ctx,
            a,
            radius,
            ssc: None,
        })
    }

    pub fn context(&self) -> &PisotContext {
        &self.ctx
    }

    pub fn context_arc(&self) -> Arc<PisotContext> {
        Arc::clone(&self.ctx)
    }

    pub fn a1(&self) -> &YElement {
        &self.a[0]
    }

    pub fn a2(&self) -> &YElement {
        &self.a[1]
    }

    pub fn translations(&self) -> [&YElement; 2] {
        [&self.a[0], &self.a[1]]
    }

    /// The four translations `(−1)^k a_j` in the order (1,1), (1,2), (2,1), (2,2).
    pub fn map_translations(&self) -> [CBall; 4] {
        let (p1, p2) = (self.a[0].value(), self.a[1].value());
        [-p1, -p2, p1.clone(), p2.clone()]
    }

    pub fn attractor_radius(&self) -> f64 {
        self.radius
    }

    pub fn ssc_certificate(&self) -> Option<&SeparationCertificate> {
        self.ssc.as_ref()
    }

    pub fn with_certificate(mut self, cert: SeparationCertificate) -> Self {
        self.ssc = Some(cert);
        self
    }
}

fn depth_gap(
    lambda: &CBall,
    a: [&CBall; 2],
    radius: f64,
    depth: u32,
) -> f64 {
    let lam = lambda.to_c64();
    let lam_abs = lambda.abs_upper();
    let digits: Vec<Complex64> = {
        let (p1, p2) = (a[0].to_c64(), a[1].to_c64());
        vec![-p1, -p2, p1, p2]
    };
    let digit_err = a[0].rad().max(a[1].rad()) + radius * f64::EPSILON;
    let lam_err = lambda.rad() + lam_abs * f64::EPSILON;
    // Each recursion step c ← d + λc adds at most this much error.
    let step_err = radius * lam_err + 8.0 * f64::EPSILON * radius + digit_err;
    let slack = up(2.0 * step_err / (1.0 - lam_abs));

    let mut centers = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(centers.len() * 4);
        for d in &digits {
            for c in &centers {
                next.push(d + lam * c);
            }
        }
        centers = next;
    }
    let hull = up(lam_abs.powi(depth as i32) * radius);
    let min_dist = (0..centers.len())
        .into_par_iter()
        .map(|i| {
            let ci = centers[i];
            centers[i + 1..]
                .iter()
                .map(|cj| (ci - cj).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    min_dist * (1.0 - 4.0 * f64::EPSILON) - 2.0 * hull - slack
}

/// Separation certificate for arbitrary translations `±a_1, ±a_2` under `λ`.
///
/// Tries depths `1..=max_depth` and returns the first whose cylinder balls are
/// pairwise disjoint. Failure means "not shown", never "not separated".
pub fn certify_ssc_translations(
    lambda: &CBall,
    a: [&CBall; 2],
    max_depth: u32,
) -> Result<SeparationCertificate, ConstructionError> {
    if max_depth == 0 || max_depth > MAX_SSC_DEPTH {
        return Err(ConstructionError::InvalidInput(format!(
            "max_depth must be in 1..={MAX_SSC_DEPTH}, got {max_depth}"
        )));
    }
    if lambda.abs_upper() >= 1.0 {
        return Err(ConstructionError::NotEligible("|λ| ≥ 1".into()));
    }
    let radius = invariant_radius(lambda, a);
    let mut best_gap = f64::NEG_INFINITY;
    for depth in 1..=max_depth {
        let gap = depth_gap(lambda, a, radius, depth);
        if gap > 0.0 {
            return Ok(SeparationCertificate {
                depth,
                min_gap: gap,
            });
        }
        best_gap = best_gap.max(gap);
    }
    Err(ConstructionError::SscInconclusive {
        max_depth,
        best_gap,
    })
}

pub fn certify_ssc(
    cfg: &IfsConfig,
    max_depth: u32,
) -> Result<SeparationCertificate, ConstructionError> {
    certify_ssc_translations(
        cfg.ctx.lambda(),
        [cfg.a[0].value(), cfg.a[1].value()],
        max_depth,
    )
}
