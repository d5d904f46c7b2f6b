//! Rank-2 Fuchsian systems with four regular singular points, their
//! isomonodromic parameter spaces, and the integral transforms induced by
//! middle convolution.

pub mod analytic;
pub mod error;
pub mod fuchsian;
pub mod mcv;
pub mod num_core;
pub mod sic;
pub mod weyl;

pub use error::{Error, Result};
pub use num_core::C64;
