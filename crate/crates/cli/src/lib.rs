//! Experiment orchestration, recovery classification and front statistics
//! for the `unitgp` command.

pub mod classify;
pub mod config;
pub mod experiment;
pub mod stats;
