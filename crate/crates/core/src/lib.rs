//! Intermittency expansions for Gaussian multiplicative chaos.
//!
//! Moments of the total mass as functions of the intermittency `mu`, their
//! Mellin transforms, and a seeded simulator for the regularized field.

pub mod error;
pub mod expansion;
pub mod gmcsim;
pub mod mellin;
pub mod moments;
pub mod quad;
pub mod specfun;

pub use error::{GmcError, Result};
