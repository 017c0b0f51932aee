use serde::Serialize;

use super::manufactured::ManufacturedCase;
use crate::config::SolverConfig;
use crate::error::Result;
use crate::linear::solve_linear_full;
use crate::resolvent::{linear_residuals, solve_direct};
use crate::spectral::x_norm;

/// Pressure is pinned by the plate traction row on both paths, so no mean
/// is subtracted before comparing.
pub const PRESSURE_CONVENTION: &str = "absolute: pressure fixed by the plate traction balance on both paths";

/// Outcome of solving one manufactured case along both linear paths.
#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub seed: u64,
    pub n_z: usize,
    /// `X`-norm of the manufactured truth.
    pub truth_norm: f64,
    /// `X`-norm of the difference between the lifted and the direct solution.
    pub path_discrepancy: f64,
    pub relative_discrepancy: f64,
    /// Relative `X`-norm errors against the truth.
    pub lift_error: f64,
    pub direct_error: f64,
    pub lift_residual: f64,
    pub direct_residual: f64,
    pub pressure_convention: &'static str,
}

pub fn cross_validate_linear(cfg: &SolverConfig, case: &ManufacturedCase) -> Result<CrossValidation> {
    let lifted = solve_linear_full(cfg, &case.f, &case.g, &case.h)?;
    let (u, p, eta) = solve_direct(cfg, &case.f, Some(&case.g), &case.h)?;
    let direct_residual = linear_residuals(cfg, &u, &p, &eta, &case.f, Some(&case.g), &case.h).max();

    let truth_norm = x_norm(&case.u, &case.p, &case.eta, 2.0)?;
    let scale = if truth_norm > 0.0 { truth_norm } else { 1.0 };
    let path_discrepancy = x_norm(&(&lifted.u - &u), &(&lifted.p - &p), &(&lifted.eta - &eta), 2.0)?;
    let lift_error = x_norm(&(&lifted.u - &case.u), &(&lifted.p - &case.p), &(&lifted.eta - &case.eta), 2.0)? / scale;
    let direct_error = x_norm(&(&u - &case.u), &(&p - &case.p), &(&eta - &case.eta), 2.0)? / scale;

    Ok(CrossValidation {
        seed: case.seed,
        n_z: cfg.n_z,
        truth_norm,
        path_discrepancy,
        relative_discrepancy: path_discrepancy / scale,
        lift_error,
        direct_error,
        lift_residual: lifted.residuals.max(),
        direct_residual,
        pressure_convention: PRESSURE_CONVENTION,
    })
}
