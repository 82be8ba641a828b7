//! Command-line front end: resolves a run configuration, evaluates the
//! mechanisms over a grid of crossover probabilities and writes CSV.

pub mod config;
pub mod error;
pub mod run;

pub use config::{Cli, Mode, RunConfig};
pub use error::CliError;
pub use run::{compute, format_g12, run, series_files, Row, RunOutput, CSV_HEADER};
