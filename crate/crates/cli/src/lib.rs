//! Evaluation and verification front end for `qmod-core`.
//!
//! [`verify`] certifies the identities numerically, [`report`] writes the
//! results as CSV or JSON, [`config`] gathers run settings and [`app`] is the
//! `qmod` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod complex;
pub mod config;
pub mod report;
pub mod verify;

pub use verify::{Grid, Identity, Outcome, Params, Summary, VerificationReport, Verifier};
