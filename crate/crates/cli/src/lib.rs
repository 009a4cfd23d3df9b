//! The `burnout` command line: every pipeline stage as a subcommand.

pub mod commands;
pub mod config;
pub mod manifest;
