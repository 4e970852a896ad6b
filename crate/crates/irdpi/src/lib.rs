//! File formats, report writers and the `irdpi` command-line tool.
//!
//! - [`format`]: the sectioned plain-text scenario and encoder files.
//! - [`report`]: JSON documents and CSV tables with lossless 17-digit floats.
//! - [`cli`]: argument parsing and subcommand dispatch.

pub mod cli;
pub mod format;
pub mod report;
