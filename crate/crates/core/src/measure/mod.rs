//! Monte Carlo samples of the self-similar measure, projections onto lines,
//! slices, and the Wiener mean-square statistic for atoms.

mod direction;
mod dump;
mod sample;
mod slice;
mod wiener;

use thiserror::Error;

use crate::algebraic::AlgebraError;
use crate::fourier::FourierError;

pub use direction::{UnitDirection, UNIT_TOLERANCE};
pub use dump::{read_samples, write_samples, PSLM_MAGIC, PSLM_VERSION};
pub use sample::{
    empirical_transform, empirical_transform_many, ks_distance_to_uniform, project, sample_measure,
    DigitWord, EmpiricalMeasure, LineMeasure, SampleMeta, Weights, CHUNK,
};
pub use slice::{
    find_slice_frequency, slice_experiment, slice_report, BandWiener, FrequencyAverage, SliceExperiment,
    SliceFrequency, SliceReport, SliceRow, SliceSpec,
};
pub use wiener::{projection_wiener, wiener_decay_check, wiener_statistic, DecayCheck, WienerEstimate};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature step {step} is too coarse; need at most {required}")]
    StepTooCoarse { step: f64, required: f64 },
    #[error("no k ≤ {k_cap} puts the frequency in ({n}, {n}+1); nearest miss k={nearest_k} at t={nearest_t:e}{}", if *.precision_limited { " (some k were undecidable at this precision)" } else { "" })]
    SliceNotFound {
        n: u64,
        k_cap: u32,
        nearest_k: u32,
        nearest_t: f64,
        precision_limited: bool,
    },
    #[error("bad sample file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
