//! Curvature of analytic metrics through truncated Taylor (jet) arithmetic.
//!
//! The crate is `no_std` with `alloc`. It evaluates metric components on
//! multivariate jets, derives the Levi-Civita connection, the Riemann, Ricci,
//! Weyl and Einstein tensors together with their covariant derivatives, and
//! runs the verification routines in [`verify`] on top of them.
//!
//! Index conventions are collected in [`conventions`].

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod conventions;
pub mod curvature;
mod error;
pub mod jets;
pub mod linalg;
mod math;
pub mod oracle;
pub mod tensors;
pub mod verify;

pub use catalog::{build_metric, sample_points, Family, MetricSpec, ScaleFactor};
pub use curvature::{build_pack, CurvaturePack, MetricField, TensorField};
pub use error::{Error, Result};
pub use jets::{seed_variables, Elementary, Jet};
pub use tensors::{MetricAtPoint, Signature, Tensor, Variance};
