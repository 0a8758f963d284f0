//! Command-line front end for the topchain index: building, querying,
//! updating and benchmarking indexes stored in a versioned text format.

pub mod commands;
pub mod error;
pub mod index_file;

pub use commands::{run, Cli};
pub use error::CliError;
