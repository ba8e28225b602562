//! Library side of the `xyz` command: dataset files, CSV plumbing, run
//! manifests and the subcommands.

pub mod commands;
pub mod dataset;
pub mod error;
pub mod manifest;
pub mod table;

pub use dataset::Dataset;
pub use error::{CliError, CliResult};
