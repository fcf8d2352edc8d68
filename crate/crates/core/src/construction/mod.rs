//! The four-map system `z ↦ λz ± a_j` with translations in
//! `𝒴 = {k λ^l : k, l ∈ N}`, its separation certificate and dimension.

mod build;
mod ifs;
mod ylattice;

use thiserror::Error;

use crate::algebraic::AlgebraError;

pub use build::{
    build_paper_ifs, hausdorff_dimension, similarity_dimension, witness_certificate,
    witness_translations, BuildStrategy, Dimension, IfsDocument, IFS_FORMAT,
};
pub use ifs::{
    certify_ssc, certify_ssc_translations, IfsConfig, SeparationCertificate, MAX_SSC_DEPTH,
};
pub use ylattice::{approximate_in_y, SearchCaps, YElement};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no k·λ^l within {eps:e} inside the search caps; best was k={best_k}, l={best_l} at distance {best_error:e}")]
    SearchExhausted {
        best_k: u64,
        best_l: u32,
        best_error: f64,
        eps: f64,
    },
    #[error("separation not shown up to depth {max_depth} (best margin {best_gap:e}); this is inconclusive, not a disproof")]
    SscInconclusive { max_depth: u32, best_gap: f64 },
    #[error("not eligible: {0}")]
    NotEligible(String),
    #[error("bad system document: {0}")]
    Document(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
