//! Scattering of a particle by one-dimensional complex PT-symmetric barriers.
//!
//! Two independent routes produce the reflection, transmission and
//! absorption probabilities: closed forms for the rectangular and Scarf
//! barriers ([`analytic`]) and direct integration of the stationary
//! Schrödinger equation for any localized potential ([`engine`]).
//! [`analysis`] sweeps energies, classifies anomalous (> 1) coefficients
//! and searches for the critical imaginary coupling. [`cli`] is the
//! command-line front end.

pub mod analysis;
pub mod analytic;
pub mod cli;
pub mod engine;
pub mod error;
pub mod potential;

pub use error::{Result, ScatterError};
pub use potential::{Approach, Coefficients, Model, PotentialSpec, Side, Units};
