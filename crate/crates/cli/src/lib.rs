//! Scenario handling, output writers and the property suite behind the `gic`
//! binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod validate;

pub use commands::{cmd_layers, cmd_region, cmd_saturation, cmd_validate, Outcome};
pub use config::{parse_mu_grid, Options, Scenario};
pub use error::CliError;
