#![no_std]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod golden;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod qcore;
pub mod search;
pub mod sdp;

pub use error::{Error, Result};
