//! Simulator for physical-layer authentication in an indoor visible-light
//! link whose verifier watches multicolor power profiles bounced off a
//! wall-mounted surface of tunable color-selective mirrors.
//!
//! The crate models the four-color QLED emission spectra, the two-hop
//! Lambertian optical channel through the mirror array, the four mirror
//! configuration strategies (fixed cyclic, static random, dynamic random,
//! random permutation), the likelihood-test verifier in both
//! single-configuration and challenge-response modes, two impersonation
//! attacks, and a seeded Monte Carlo engine that turns all of this into
//! detection-error-tradeoff curves.
//!
//! Everything downstream of a seed is deterministic: per-trial random
//! substreams are derived from `(master seed, plan hash, trial index, role)`
//! so results do not depend on thread count or scheduling.

// Negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
// along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod channel;
pub mod cli;
pub mod config;
pub mod cris;
pub mod geometry;
pub mod pla;
pub mod report;
pub mod sim;
pub mod spectral;

pub use channel::{ColorVector, GainExponent, LedModel, Photodetector};
pub use cris::{CrisConfiguration, ReflectanceProfile, StrategyKind};
pub use geometry::{CrisGrid, OrientedPoint, Scene, Vec3};
pub use pla::{DetCurve, ScoreSamples};
pub use sim::{ExperimentPlan, NoiseModel, PlaMode};
pub use spectral::{ColorChannel, HModelParams, SpectralBand};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("wavelength {0} nm outside supported domain [{min}, {max}] nm",
        min = spectral::WAVELENGTH_MIN, max = spectral::WAVELENGTH_MAX)]
    WavelengthOutOfDomain(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("source and destination coincide at ({0}, {1}, {2})")]
    CoincidentPoints(f64, f64, f64),

    #[error("mirror grid extends outside the room: {0}")]
    GridOutsideRoom(String),

    #[error("dimension mismatch: expected {expected} rows, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("reflectivity {0} outside [0, 1]")]
    ReflectivityOutOfRange(f64),

    #[error("underdetermined fit: {got} probe configurations for {needed} unknowns")]
    Underdetermined { needed: usize, got: usize },

    #[error("line-of-sight gain is zero; attacker cannot reach the receiver")]
    UnreachableReceiver,

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("score samples empty; cannot build a detection-error curve")]
    EmptyScores,
}

pub type Result<T> = std::result::Result<T, Error>;
