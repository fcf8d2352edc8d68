use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    approximate_in_y, certify_ssc, certify_ssc_translations, ConstructionError, IfsConfig,
    SearchCaps, SeparationCertificate,
};
use crate::algebraic::{
    verify_complex_pisot, verify_dense_rotation_criterion, DenseRotationStatus,
    MonicIntPolynomial, PisotContext,
};
use crate::hp::{CBall, RBall};

/// How to pick `(a_1, a_2) ∈ 𝒴²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuildStrategy {
    /// Approximate the witness pair `(2/3, 2i/3)` within `eps_fraction · g`,
    /// where `g` is the witness's separation gap, then re-certify.
    Perturb { eps_fraction: f64, caps: SearchCaps },
    /// Enumerate `𝒴²` by increasing `max(l)`, then `max(k)`, and take the
    /// first pair whose depth-1 cylinders are certified disjoint.
    Search { max_l: u32, max_k: u64 },
}

impl Default for BuildStrategy {
    fn default() -> Self {
        BuildStrategy::Search {
            max_l: 8,
            max_k: 64,
        }
    }
}

impl BuildStrategy {
    pub fn perturb(eps_fraction: f64) -> Self {
        BuildStrategy::Perturb {
            eps_fraction,
            caps: SearchCaps::default(),
        }
    }
}

fn check_eligible(ctx: &PisotContext) -> Result<(), ConstructionError> {
    let pisot = verify_complex_pisot(ctx)?;
    if !pisot.is_complex_pisot {
        return Err(ConstructionError::NotEligible(format!(
            "not a complex Pisot number: {}",
            pisot.failure.unwrap_or_default()
        )));
    }
    let dense = verify_dense_rotation_criterion(ctx, 64)?;
    match dense.status {
        DenseRotationStatus::Holds => Ok(()),
        DenseRotationStatus::Reducible { root } => Err(ConstructionError::NotEligible(format!(
            "polynomial has the rational root {root}"
        ))),
        DenseRotationStatus::Inapplicable { degree } => Err(ConstructionError::NotEligible(
            format!("dense rotations have no criterion in degree {degree}"),
        )),
    }
}

/// The pair `(2/3, 2i/3)` as balls.
pub fn witness_translations(ctx: &PisotContext) -> [CBall; 2] {
    let prec = ctx.precision();
    let third = RBall::from_int(3, prec).recip().expect("3 is invertible");
    let two_thirds = &RBall::from_int(2, prec) * &third;
    let zero = RBall::zero(prec);
    [
        CBall::from_parts(&two_thirds, &zero),
        CBall::from_parts(&zero, &two_thirds),
    ]
}

/// Separation certificate for the witness pair `(2/3, 2i/3)`; needs `|λ| < 1/3`.
pub fn witness_certificate(ctx: &PisotContext) -> Result<SeparationCertificate, ConstructionError> {
    let w = witness_translations(ctx);
    certify_ssc_translations(ctx.lambda(), [&w[0], &w[1]], 1)
}

fn nearest_in_y_up_to_sign(
    ctx: &PisotContext,
    target: Complex64,
    eps: f64,
    caps: SearchCaps,
) -> Result<(u64, u32), ConstructionError> {
    // `a` and `−a` generate the same four maps, so either sign will do.
    let plus = approximate_in_y(ctx, target, eps, caps);
    let minus = approximate_in_y(ctx, -target, eps, caps);
    match (plus, minus) {
        (Ok(p), Ok(m)) => Ok(if (m.l(), m.k()) < (p.l(), p.k()) {
            (m.k(), m.l())
        } else {
            (p.k(), p.l())
        }),
        (Ok(p), Err(_)) => Ok((p.k(), p.l())),
        (Err(_), Ok(m)) => Ok((m.k(), m.l())),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Builds the four-map system with a certified separation gap.
///
/// Requires θ to be a complex Pisot root of an irreducible cubic.
pub fn build_paper_ifs(
    ctx: Arc<PisotContext>,
    strategy: BuildStrategy,
) -> Result<IfsConfig, ConstructionError> {
    check_eligible(&ctx)?;
    match strategy {
        BuildStrategy::Perturb { eps_fraction, caps } => {
            if !(eps_fraction > 0.0 && eps_fraction < 1.0) {
                return Err(ConstructionError::InvalidInput(format!(
                    "eps_fraction must lie strictly between 0 and 1, got {eps_fraction}"
                )));
            }
            let g = witness_certificate(&ctx)?.min_gap;
            let eps = eps_fraction * g;
            let a1 = nearest_in_y_up_to_sign(&ctx, Complex64::new(2.0 / 3.0, 0.0), eps, caps)?;
            let a2 = nearest_in_y_up_to_sign(&ctx, Complex64::new(0.0, 2.0 / 3.0), eps, caps)?;
            let cfg = IfsConfig::new(ctx, a1, a2)?;
            let cert = certify_ssc(&cfg, 4)?;
            Ok(cfg.with_certificate(cert))
        }
        BuildStrategy::Search { max_l, max_k } => {
            if max_k == 0 {
                return Err(ConstructionError::InvalidInput("max_k must be at least 1".into()));
            }
            let mut best_gap = f64::NEG_INFINITY;
            for big_l in 0..=max_l {
                for big_k in 1..=max_k {
                    for (a1, a2) in pairs_on_shell(big_l, big_k) {
                        let cfg = IfsConfig::new(Arc::clone(&ctx), a1, a2)?;
                        match certify_ssc(&cfg, 1) {
                            Ok(cert) => return Ok(cfg.with_certificate(cert)),
                            Err(ConstructionError::SscInconclusive { best_gap: g, .. }) => {
                                best_gap = best_gap.max(g)
                            }
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            Err(ConstructionError::SscInconclusive {
                max_depth: 1,
                best_gap,
            })
        }
    }
}

/// Unordered pairs `((k1,l1),(k2,l2))` with `max(l) = big_l`, `max(k) = big_k`,
/// listed with `(l1,k1) < (l2,k2)` in increasing lexicographic order.
fn pairs_on_shell(big_l: u32, big_k: u64) -> Vec<((u64, u32), (u64, u32))> {
    let mut out = Vec::new();
    for l1 in 0..=big_l {
        for k1 in 1..=big_k {
            for l2 in l1..=big_l {
                for k2 in 1..=big_k {
                    if (l2, k2) <= (l1, k1) {
                        continue;
                    }
                    if l1.max(l2) != big_l || k1.max(k2) != big_k {
                        continue;
                    }
                    out.push(((k1, l1), (k2, l2)));
                }
            }
        }
    }
    out
}

/// `log 4 / log|θ|` with an error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dimension {
    pub value: f64,
    pub error: f64,
}

/// Similarity dimension of four maps contracting by `1/theta_abs`.
pub fn similarity_dimension(theta_abs: f64) -> f64 {
    4f64.ln() / theta_abs.ln()
}

/// Hausdorff dimension of the attractor, valid once separation is certified.
pub fn hausdorff_dimension(cfg: &IfsConfig) -> Result<Dimension, ConstructionError> {
    if cfg.ssc_certificate().is_none() {
        return Err(ConstructionError::NotEligible(
            "dimension formula needs a separation certificate".into(),
        ));
    }
    let abs = cfg.context().theta_abs();
    let x = abs.mid_f64();
    let value = similarity_dimension(x);
    let ln = x.ln();
    let error = 4f64.ln() * abs.rad() / (x * ln * ln) * 2.0 + 8.0 * f64::EPSILON * value;
    Ok(Dimension { value, error })
}

/// On-disk form of a certified system. Real numbers are decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsDocument {
    pub format: String,
    pub polynomial: Vec<i64>,
    pub polynomial_text: String,
    pub precision_digits: u32,
    pub k1: u64,
    pub l1: u32,
    pub k2: u64,
    pub l2: u32,
    pub certificate_depth: String,
    pub certificate_min_gap: String,
    pub attractor_radius: String,
    pub dimension: String,
}

pub const IFS_FORMAT: &str = "pisot-ifs/1";

impl IfsConfig {
    pub fn to_document(&self) -> Result<IfsDocument, ConstructionError> {
        let cert = self.ssc_certificate().ok_or_else(|| {
            ConstructionError::NotEligible("only certified systems are written out".into())
        })?;
        let dim = hausdorff_dimension(self)?;
        let poly = self.context().polynomial();
        Ok(IfsDocument {
            format: IFS_FORMAT.into(),
            polynomial: poly.all_coefficients(),
            polynomial_text: poly.to_string(),
            precision_digits: self.context().precision_digits(),
            k1: self.a1().k(),
            l1: self.a1().l(),
            k2: self.a2().k(),
            l2: self.a2().l(),
            certificate_depth: cert.depth.to_string(),
            certificate_min_gap: format!("{}", cert.min_gap),
            attractor_radius: format!("{}", self.attractor_radius()),
            dimension: format!("{}", dim.value),
        })
    }

    /// Rebuilds the context and re-runs the separation check at the stored depth.
    pub fn from_document(doc: &IfsDocument) -> Result<IfsConfig, ConstructionError> {
        let bad = |what: &str| ConstructionError::Document(what.to_string());
        if doc.format != IFS_FORMAT {
            return Err(bad(&format!("unknown format {:?}", doc.format)));
        }
        let poly = MonicIntPolynomial::from_coefficients(&doc.polynomial)?;
        let depth: u32 = doc
            .certificate_depth
            .parse()
            .map_err(|_| bad("certificate_depth is not an integer"))?;
        let ctx = Arc::new(PisotContext::new(poly, doc.precision_digits)?);
        let cfg = IfsConfig::new(ctx, (doc.k1, doc.l1), (doc.k2, doc.l2))?;
        let cert = certify_ssc(&cfg, depth)?;
        Ok(cfg.with_certificate(cert))
    }

    pub fn to_json(&self) -> Result<String, ConstructionError> {
        let doc = self.to_document()?;
        let mut s = serde_json::to_string_pretty(&doc)
            .map_err(|e| ConstructionError::Document(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<IfsConfig, ConstructionError> {
        let doc: IfsDocument =
            serde_json::from_str(text).map_err(|e| ConstructionError::Document(e.to_string()))?;
        Self::from_document(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_enumerate_each_pair_once() {
        let mut all = Vec::new();
        for l in 0..=2 {
            for k in 1..=3 {
                all.extend(pairs_on_shell(l, k));
            }
        }
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
        // 9 elements with l ≤ 2, k ≤ 3 give C(9,2) unordered pairs.
        assert_eq!(n, 36);
    }

    #[test]
    fn trivial_dimensions() {
        assert_eq!(similarity_dimension(4.0), 1.0);
        assert_eq!(similarity_dimension(2.0), 2.0);
    }
}
