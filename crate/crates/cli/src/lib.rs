//! Configuration, commands and artifact writers behind the `cornerscale` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod svg;

pub use config::RunConfig;
pub use error::CliError;
