// NaN must fail validity checks, so `!(x > 0.0)` is used deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boutroux;
pub mod contour;
pub mod curve;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod orthopoly;
pub mod perturbation;
pub mod quad;
pub mod riemann;

pub use error::{Error, Result};
