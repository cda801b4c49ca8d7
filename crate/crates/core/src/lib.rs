//! Derivative recurrences for radially symmetric Green's functions.
//!
//! The pipeline runs in two phases. The precomputation phase turns a PDE with
//! polynomial coefficients into an ODE in `x1` and then into order-parametric
//! recurrences ([`pde2ode`], [`recurrence`]). The online phase evaluates
//! `∂^0..∂^P` of the Green's function along `x1` at a point, switching between a
//! large-|x1| and a small-|x1| recurrence ([`evaluator`]). The [`qbx`] module
//! uses the evaluator inside a rotation-based line-Taylor QBX single-layer
//! evaluator.

pub mod error;
pub mod symcore;
pub mod pde2ode;
pub mod recurrence;
pub mod kernels;
pub mod evaluator;
pub mod qbx;
pub mod experiments;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
