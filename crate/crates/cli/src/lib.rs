//! Library side of the `tamegraph` command-line tool.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;

pub use config::{Format, JobConfig, Mode};
pub use report::Report;
