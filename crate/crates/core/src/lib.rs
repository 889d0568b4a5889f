#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod policy;
pub mod quadrature;
pub mod roots;
pub mod scenario;
pub mod schedules;
pub mod valuation;
pub mod verify;

pub use error::{Error, Result};
