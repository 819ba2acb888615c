//! Spectra of the radial anharmonic oscillators
//! ψ'' = (x^{2α} + ℓ(ℓ+1)/x² − E)ψ on the universal cover of the punctured plane.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod integrate;
pub mod cover;
pub mod error;
pub mod geometry;
pub mod model;
pub mod path;
pub mod quad;
pub mod registry;
pub mod roots;
pub mod spectral;
pub mod verify;
pub mod volterra;

pub use cover::CoverPoint;
pub use error::{Error, Result};
pub use model::OscillatorParams;
pub use path::PathSpec;
pub use num_complex::Complex64;
