//! Spectral-Lagrangian solver for the space-homogeneous Boltzmann equation
//! with Variable Hard Potential kernels, elastic or inelastic collisions,
//! heating sources, and conservation enforced by a Lagrange-multiplier
//! projection.

pub mod cli;
pub mod collision;
pub mod config;
pub mod conserve;
pub mod docsbench;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod observables;
pub mod quad;
pub mod reference;
pub mod sources;
pub mod stepper;
pub mod transform;

pub use error::{Error, Result};
