//! Library side of the `qcorr` command-line tool.

pub mod commands;
pub mod report;
pub mod statefile;
pub mod sweep;
