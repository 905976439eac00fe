//! Command-line driver: `hslab identity|check|sharpness|estimate|all`.
//!
//! Exit codes: 0 all assertions held, 1 a mathematical assertion failed,
//! 2 usage or configuration error, 3 numerical non-convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod error;

pub use app::run;
pub use config::RunConfig;
