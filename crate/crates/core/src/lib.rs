//! Painlevé II transition asymptotics in the double-scaling limit, together with
//! the Airy-kernel Fredholm determinant and the numerical oracles used to check them.
//!
//! The crate is organised bottom-up:
//! [`specfun`] holds the special functions, [`scaling`] the double-scaling
//! coordinates and the elliptic modulus, [`asymptotics`] the closed-form
//! evaluators and [`oracles`] the direct ODE and Nyström computations.
//! [`verify`] runs the acceptance checks shared by the test suite and the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod asymptotics;
pub mod error;
pub mod oracles;
pub mod quad;
pub mod scaling;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
