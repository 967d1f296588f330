//! File formats, JSON output, fixtures, random instances, and the command
//! line for `evidential-core`.

pub mod cli;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod json;

pub use cli::run;
