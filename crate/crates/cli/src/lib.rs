//! Command-line front end: file formats, reports and the fuzz harness.

pub mod commands;
pub mod document;
pub mod fuzz;
pub mod report;

pub use commands::{run_command, run_with_caps, Caps, Outcome};
