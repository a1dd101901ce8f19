//! Numerical laboratory for the planar inverse viscosity problem on the unit disk.
//!
//! The library builds spectral discretizations of the stationary Stokes and
//! Navier-Stokes systems with variable viscosity, the equivalent fourth-order
//! stream-function (plate) formulation, and the complex-analytic machinery
//! (Wirtinger calculus, solid Cauchy transforms, d-bar solvers) that connects
//! boundary measurements of the flow to the viscosity in the interior.

pub mod dbar;
pub mod domain;
pub mod equivalence;
pub mod first_order;
pub mod lab;
pub mod plate;
pub mod stokes;

mod error;
mod linalg;

pub use error::{Error, Result};
