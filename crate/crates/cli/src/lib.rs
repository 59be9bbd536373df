//! File formats, reports and subcommands of the `graphqec` tool.

pub mod cli;
pub mod commands;
pub mod formats;
pub mod report;

pub use cli::{execute, run, Cli};
