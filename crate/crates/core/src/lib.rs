//! Pseudospectral simulation of fluid SPDEs with transport noise on the
//! periodic torus, built around a cut-off and mollified approximation
//! scheme, together with numerical checks of the operator estimates that
//! scheme relies on.
//!
//! Layout:
//! - [`spectral`]: fields, Fourier multipliers, mollifiers, norms
//! - [`lie`]: Lie-type transport operators and the Stratonovich-to-Itô correction
//! - [`noise`]: admissible correlation fields and seeded Brownian paths
//! - [`models`]: two-component Camassa–Holm, CCF and SQG operator splittings
//! - [`solver`]: cut-off Euler–Maruyama / Stratonovich–Heun integration
//! - [`estimates`]: resolution sweeps for commutator and cancellation bounds

pub mod error;
pub mod estimates;
pub mod lie;
pub mod models;
pub mod noise;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
