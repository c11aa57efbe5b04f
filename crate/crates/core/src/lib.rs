//! Simulation and training of a two-mode bosonic classifier with data
//! re-uploading.
//!
//! - [`fock`]: exact N-photon, two-mode linear optics.
//! - [`circuit`]: layered circuits whose phases encode data and parameters.
//! - [`trainer`]: sequential minimal optimization over trigonometric
//!   reconstructions of the detection probability.
//! - [`data`], [`eval`]: datasets, metrics, and decision grids.

pub mod circuit;
pub mod data;
pub mod error;
pub mod eval;
pub mod fock;
pub mod trainer;

pub use circuit::{CircuitSpec, ElementKind, ElementSpec, EncodingSpec, InputState, Theta};
pub use data::{Circle, Dataset, LabeledPoint};
pub use error::{Error, Result};
pub use eval::{ConfusionMatrix, Metrics, Rates};
pub use trainer::{train, ProbeMode, TrainConfig, TrainOutcome};
