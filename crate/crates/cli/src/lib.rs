//! Library side of the `chern` command-line driver: configuration, the
//! per-point pipeline, sweep orchestration and output records.

pub mod config;
pub mod numexpr;
pub mod pipeline;
pub mod record;
pub mod run;
