//! File formats, configuration and subcommands for `railvuln`.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod pool;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use pool::Pool;
