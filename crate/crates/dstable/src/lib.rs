//! Generalized discrete stable distributions.
//!
//! Thinning and portlying operators, the positive, signed, symmetric and
//! Chebyshev-type discrete stable families, closed-form and series PMFs,
//! moments, exact samplers, and numerical checks of the stability identities.

pub mod cli;
pub mod distributions;
mod error;
pub mod moments;
pub mod pmf;
pub mod sampler;
pub mod series;
pub mod special_fn;
pub mod stats;
pub mod thinning;
pub mod verify;

pub use error::{Error, Result};
