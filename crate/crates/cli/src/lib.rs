//! Experiment runner for minimal right inverses of Lévy processes.

pub mod config;
pub mod experiments;
pub mod output;
