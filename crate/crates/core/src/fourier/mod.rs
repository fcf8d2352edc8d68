//! Fourier transform of the self-similar measure through its infinite product,
//! the certified lower bound along `4π θ̄^N`, and direction scans.

mod bfactor;
pub mod control;
mod evaluator;
mod scan;

use thiserror::Error;

use crate::algebraic::AlgebraError;

pub use bfactor::{b_n, certify_lower_bound, factor_from_args, BFactor, LowerBound};
pub use evaluator::{transform, FourierEvaluator, FrequencySample, DEFAULT_TAIL_TOL};
pub use scan::{
    admissible_pisot_indices, log_radii, orbit_cell_coverage, pisot_direction_angle,
    pisot_indices_in_range, scan_directions, sup_along_pisot_direction, DirectionSup, ScanGrid,
    ScanRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("b_{n} is not separated from zero (margin {margin:e}); raise the precision")]
    MarginUndecided { n: i64, margin: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
