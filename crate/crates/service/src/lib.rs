//! Command-line stages and the read-only HTTP service over a snapshot of
//! trained artifacts.

pub mod api;
pub mod artifacts;
pub mod cli;
pub mod snapshot;
