//! Self-similar measures in the plane whose contraction is the inverse of a
//! complex Pisot number.
//!
//! The crate builds the four-map iterated function system
//! `z ↦ λz ± a_j` with `λ = 1/θ`, certifies strong separation, evaluates the
//! Fourier transform of the natural self-similar measure through its infinite
//! product, certifies a positive lower bound along `4π θ̄^N`, and provides Monte
//! Carlo tools for projections and slices.

pub mod algebraic;
pub mod construction;
pub mod fourier;
pub mod hp;
pub mod measure;
