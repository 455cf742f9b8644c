pub mod enumerate;
pub mod error;
pub mod format;
pub mod harness;
pub mod report;
pub mod search;

pub use error::{CliError, ParseError, Result};
