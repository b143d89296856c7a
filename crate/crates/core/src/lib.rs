//! Configuration interaction over a B-spline radial basis for two-electron
//! (helium-like) atoms and ions, with the spatial entanglement of the
//! resulting states measured through the one-particle reduced density matrix.
//!
//! The pipeline is
//! [`bspline`] → [`orbitals`] → [`ci`] → [`entanglement`], orchestrated by
//! [`run`]. [`oracle`] holds brute-force reference implementations that the
//! test suites and the `selftest` command check the production paths against.

pub mod angular;
pub mod bspline;
pub mod ci;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod orbitals;
pub mod quadrature;
pub mod run;
pub mod selftest;

pub use error::{Error, Result};
