//! Chart-level Kähler geometry with forward-mode automatic differentiation.
//!
//! The crate evaluates metrics, connections and tensor fields on a single
//! coordinate chart and measures how far model fields are from satisfying
//! the Killing, Hamiltonian and foliation identities of Kähler geometry.
#![cfg_attr(not(test), no_std)]
// `!(x <= tol)` is used on purpose so that NaN residuals fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dual;
pub mod error;
pub mod field;
pub mod foliation;
pub mod geometry;
pub mod hamiltonian;
pub mod kahler;
pub mod killing;
pub mod linalg;
pub mod models;
pub mod real;
pub mod report;
pub mod sampling;
pub mod suites;

pub use error::{Error, Result};
