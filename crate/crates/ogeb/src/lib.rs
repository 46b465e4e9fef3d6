//! File formats, JSON reports and the `ogeb` command-line driver on top of
//! [`ogeb_core`].

pub mod cli;
pub mod config;
pub mod formats;
pub mod report;

pub use config::{Command, JsonTarget, RunConfig, RunError, SetVariant};
pub use report::{build, Built, Report};
