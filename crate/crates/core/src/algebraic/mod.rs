//! Exact and certified arithmetic around a complex Pisot number θ.

mod context;
mod polynomial;
mod power_sums;
mod roots;

use thiserror::Error;

pub use context::{
    dist_2re_theta_pow_to_z, verify_complex_pisot, verify_dense_rotation_criterion,
    DenseRotationCertificate, DenseRotationStatus, ImaginaryProbe, PisotCertificate,
    PisotContext, PowerReduction,
};
pub use polynomial::MonicIntPolynomial;
pub use power_sums::{power_sum, PowerSumSequence};
pub use roots::{find_roots, RootBall};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("precision of {0} digits is outside the supported range")]
    InvalidPrecision(u32),
    #[error("polynomial has a repeated root")]
    NotSquareFree,
    #[error("root refinement stopped at radius {achieved:e}, target was {target:e}")]
    NonConvergence { target: f64, achieved: f64 },
    #[error("undecided at {digits} digits ({what}); raise the precision")]
    PrecisionInsufficient { digits: u32, what: String },
    #[error("the dominant root is real, so there is no rotation to test")]
    RealDominantRoot,
    #[error("negative powers need constant term ±1, got {0}")]
    ConstantTermNotUnit(i64),
}
