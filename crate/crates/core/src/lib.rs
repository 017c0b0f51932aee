//! Spectral solver for the time-periodic interaction of a viscous fluid slab
//! with a damped Kirchhoff-Love plate.

#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod halfspace;
pub mod lift;
pub mod linear;
pub mod nonlinear;
pub mod resolvent;
pub mod spectral;
pub mod validation;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use spectral::{ModeIndex, NormSpec, PlateField, SpectralField, TorusGrid};
pub use num_complex::Complex64;
