//! Command-line front end for `spincoh-core`: TOML scenario configs in,
//! CSV and JSON artifacts out.

pub mod cli;
pub mod config;
pub mod error;
pub mod evolve;
pub mod output;
pub mod stars;
pub mod sweep;
pub mod verify;

pub use error::CliError;
