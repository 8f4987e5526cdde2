//! Command-line front end for `formal-inverse`: map documents, seeded
//! generators, the `finv` subcommands and the benchmark harness.

pub mod bench;
pub mod commands;
pub mod doc;
pub mod error;
pub mod gen;

pub use commands::{run_command, Outcome};
pub use doc::{parse_documents, parse_map, MapDocument};
pub use error::CliError;
