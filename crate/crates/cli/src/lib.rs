//! Configuration-driven experiment runner for switching-sequence studies.

pub mod commands;
pub mod config;
pub mod error;

pub use config::ExperimentConfig;
pub use error::CliError;
