//! Canonical stochastic flows on the phase plane.
//!
//! Exact polynomial Poisson algebra, the model catalogue, an Euler–Maruyama
//! engine with Jacobian tracking, and Lyapunov steady states for linear
//! models.

pub mod algebra;
pub mod catalog;
pub mod config;
pub mod sde;
pub mod steady;
pub mod verify;

pub use nalgebra::{Matrix2, Vector2};
