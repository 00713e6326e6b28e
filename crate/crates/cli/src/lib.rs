//! File formats, parallel sweeps and the command implementations behind the
//! `billiard` binary.
//!
//! Domains are TOML files (see [`config::DomainSpec`]); every table is written
//! as CSV with a fixed number format so repeated runs are byte-identical.

pub mod commands;
pub mod config;
pub mod svg;
pub mod sweep;
pub mod table;

pub use commands::Output;
pub use config::{Backend, ConfigError, Domain, Job};
