//! Scenario loading, verification commands and JSON reports for the
//! `helixforms` binary.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;

pub use error::{CliError, Result};
pub use report::{Check, Report, Status};
pub use scenario::{load_scenario, parse_scenario, Scenario};
