//! Command-line front end, file formats and acceptance suite for
//! [`sepverify_core`].

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod method;
pub mod strategy;
pub mod sweep;

pub use error::{AppError, AppResult};
