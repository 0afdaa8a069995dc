//! Front end for `qrlsim`: configuration, result files and command bodies.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
