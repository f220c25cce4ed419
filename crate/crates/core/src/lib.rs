//! User assignment for distributed large intelligent surface (LIS) systems.
//!
//! A LIS system is a set of small square receiving surfaces ("units") in the
//! `z = 0` plane. Each unit runs a matched filter for one user. This crate
//! computes the matched-filter coupling coefficients between users on every
//! unit, turns the received signal strengths into a cost matrix, and assigns
//! users to units by solving a linear sum (Kuhn-Munkres) or linear bottleneck
//! (threshold) assignment problem. Brute-force enumeration is provided as the
//! reference for both, and [`experiments`] runs the Monte Carlo studies.
//!
//! Module map:
//! - [`scenario`]: geometry, users, reflecting hall, scenario sampling.
//! - [`field`]: channel model, coupling integrals, center-point RSS estimate.
//! - [`assign`]: user rates, cost matrices, LSAP/LBAP solvers, oracles.
//! - [`experiments`]: SIR study, rate sweeps, CSV output.
//! - [`config`]: key/value scenario and sweep configuration files.
//! - [`cli`]: the `lis-assign` command-line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assign;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod field;
pub mod scenario;

pub use error::{Error, Result};
