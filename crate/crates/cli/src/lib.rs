//! Scenario parsing, forcing expressions and subcommands of the `plateflow`
//! binary.

pub mod commands;
pub mod error;
pub mod expr;
pub mod manifest;
pub mod scenario;

pub use error::CliError;
pub use scenario::ScenarioConfig;
