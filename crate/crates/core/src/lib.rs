//! Desk-scale emulation of a mean-field multi-copy quantum solver for the
//! cubic toy model ẋ = x − αx³, together with the classical baselines it is
//! benchmarked against, Born-rule measurement emulation, and the hardware
//! resource arithmetic for running the history-state approach on a real
//! device.
//!
//! Module map:
//! - [`qubit`]: minimal statevector simulator (gates, measurement, Bloch
//!   coordinates, product-state test)
//! - [`copy_solver`]: the N-copy nonlinear solver, its interaction operator,
//!   and the block history-state system
//! - [`baselines`]: forward Euler, RK4, the closed-form solution, ensemble
//!   averaging, and Euler–Maruyama
//! - [`resources`]: qubit/depth/runtime/fidelity arithmetic in log domain
//! - [`experiments`]: deterministic figure reproductions and the
//!   error-scaling study

pub mod baselines;
pub mod copy_solver;
pub mod error;
pub mod experiments;
pub mod ode;
pub mod qubit;
pub mod resources;
pub mod rng;
pub mod svg;

pub use error::{Error, Result};
pub use ode::OdeSpec;
