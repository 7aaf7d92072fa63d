//! Joint source-channel coding of a Gaussian source over a Gaussian channel
//! with correlated, transmitter-known interference.
//!
//! The crate evaluates outer bounds, the achievable distortion of uncoded,
//! naive-DPC, digital-DPC and hybrid digital-analog (HDA) schemes, their
//! behavior under SNR mismatch, and the distortion region of a cognitive
//! radio channel built from the same ingredients. Closed forms live in
//! [`estimators`]; [`mc`] re-derives them by simulation.

pub mod bounds;
pub mod cli;
pub mod cognitive;
pub mod error;
pub mod estimators;
pub mod mc;
pub mod mismatch;
pub mod model;
pub mod optimizer;
pub mod schemes;

pub use error::{Error, Result};
pub use model::{Allocation, ChannelSpec, CognitiveConfig, DistortionPoint, Scheme, SourceModel};
