//! Bayesian subgroup identification for basket trials.
//!
//! Each indication of a basket trial is modelled either with one response
//! rate for all patients or with separate rates below and above an unknown
//! biomarker threshold; thresholds are shrunk toward a common mean across
//! indications. The crate provides
//!
//! - [`model`]: domain types, likelihoods and prior densities,
//! - [`sampler`]: a Metropolis-within-Gibbs sampler over both sub-models,
//! - [`decision`]: interval-based trial actions and threshold estimation,
//! - [`trial`]: analyses, the simulated interim/final trial and operating characteristics,
//! - [`io`]: CSV data, TOML configuration and report files,
//! - [`cli`]: the `basket-subgroup` command-line tool.

pub mod cli;
pub mod decision;
pub mod error;
pub mod io;
pub mod model;
pub mod sampler;
pub mod trial;

mod density;

pub use error::{Error, Result};
