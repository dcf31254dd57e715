//! Command-line driver for filament pair experiments.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
