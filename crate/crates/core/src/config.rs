//! Solver configuration.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::TorusGrid;

/// Physical parameters, truncations and tolerances shared by every solver path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Time period.
    pub period_t: f64,
    /// Lateral period of the plate torus.
    pub period_x: f64,
    /// Fluid viscosity.
    pub mu_f: f64,
    /// Kelvin-Voigt damping coefficient of the plate.
    pub mu_s: f64,
    /// Number of retained time modes (odd).
    pub n_t: usize,
    /// Number of retained lateral modes per axis (odd).
    pub n_x: usize,
    /// Chebyshev degree in the wall-normal direction.
    pub n_z: usize,
    /// Equation residual tolerance of the mode solver.
    pub tol_eq: f64,
    /// Boundary-condition residual tolerance of the mode solver.
    pub tol_bc: f64,
    /// Relative stopping tolerance of the fixed-point iteration.
    pub picard_tol: f64,
    pub max_iter: usize,
    /// Smallness radius of the plate deformation gate.
    pub eps0: f64,
    /// Zero-pad pointwise products with the 2/3 rule.
    pub dealias: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            period_t: 2.0 * PI,
            period_x: 2.0 * PI,
            mu_f: 1.0,
            mu_s: 1.0,
            n_t: 5,
            n_x: 5,
            n_z: 16,
            tol_eq: 1e-9,
            tol_bc: 1e-9,
            picard_tol: 1e-11,
            max_iter: 30,
            eps0: 0.1,
            dealias: true,
        }
    }
}

impl SolverConfig {
    pub fn with_truncation(mut self, n_t: usize, n_x: usize, n_z: usize) -> Self {
        self.n_t = n_t;
        self.n_x = n_x;
        self.n_z = n_z;
        self
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.period_t, self.period_x, self.n_t, self.n_x, self.n_z)
    }

    /// Checks the parameters required by the linear solver (`mu_s > 0`).
    /// The negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_f > 0.0) {
            return Err(Error::Parameters(format!("mu_f must be positive, got {}", self.mu_f)));
        }
        if !(self.mu_s > 0.0) {
            return Err(Error::Parameters(format!("mu_s must be positive, got {}", self.mu_s)));
        }
        if !(self.period_t > 0.0 && self.period_x > 0.0) {
            return Err(Error::Parameters("periods must be positive".into()));
        }
        self.grid().map(|_| ())
    }
}
