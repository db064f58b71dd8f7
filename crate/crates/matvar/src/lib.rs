//! Hypergeometric functions of matrix argument, zonal polynomials, and matrix-variate
//! elliptical, compound and scale-mixture densities.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::large_enum_variant)]

pub mod densities;
pub mod error;
pub mod hypergeom;
pub mod matrixops;
pub mod partitions;
pub mod samplers;
pub mod specialfun;
pub mod verify;
pub mod zonal;

pub use error::{Error, Result};
