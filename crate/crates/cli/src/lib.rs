//! Experiment runner for adversarial learning of quantum state-preparation
//! circuits: presets, seeded repetitions, CSV/JSON artifacts, and quick-look
//! SVG charts.

pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod svg;
pub mod tomography;

pub use config::{ExperimentConfig, Preset};
pub use error::CliError;
