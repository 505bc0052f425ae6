//! Numerical toolkit for symmetrization inequalities on probability spaces
//! with convex isoperimetric estimators.

pub mod cli;
pub mod curve;
pub mod error;
pub mod functions;
pub mod grid;
pub mod measures;
pub mod operators;
pub mod rearrange;
pub mod rispace;
pub mod verify;

pub use error::{Error, Result};
