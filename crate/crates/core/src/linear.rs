//! The full linear solve: lift the prescribed divergence, solve the steady
//! and purely oscillatory problems with solenoidal data, and add the lift back.

use serde::Serialize;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::lift::lift_divergence;
use crate::resolvent::{linear_residuals, synthesize, ModeResiduals, ModeSolver, solve_modes};
use crate::spectral::{
    dt, dx, dz, project_oscillatory, project_oscillatory_plate, project_steady, project_steady_plate, trace_bottom,
    x_norm, y_norm, PlateField, SpectralField, TorusGrid,
};

#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub u: SpectralField,
    pub p: SpectralField,
    pub eta: PlateField,
    /// The divergence lift `w` contained in `u`.
    pub lift: SpectralField,
    /// Strong-form residuals of the original problem with data `(f, g, h)`.
    pub residuals: ModeResiduals,
}

fn vector_laplacian(w: &SpectralField) -> SpectralField {
    let lateral = &dx(&dx(w, 0), 0) + &dx(&dx(w, 1), 1);
    &lateral + &dz(w, 2)
}

/// Data with the lift removed: `f - d_t w + mu Lap w` and
/// `h - 2 mu d_3 w_3` on the plate.
fn reduced_data(cfg: &SolverConfig, f: &SpectralField, h: &PlateField, w: &SpectralField) -> (SpectralField, PlateField) {
    let ft = &(f - &dt(w)) + &vector_laplacian(w).scaled(cfg.mu_f);
    let trace = trace_bottom(&dz(&w.component(2), 1), 0);
    let ht = h - &trace.scaled(2.0 * cfg.mu_f);
    (ft, ht)
}

/// Reusable linear solver; with caching enabled every mode operator is
/// factorised once.
pub struct LinearSolver {
    cfg: SolverConfig,
    cache: Option<ModeSolver>,
}

impl LinearSolver {
    pub fn new(cfg: &SolverConfig, cache: bool) -> Result<Self> {
        cfg.validate()?;
        let cache = if cache { Some(ModeSolver::new(&cfg.grid()?, cfg)?) } else { None };
        Ok(Self { cfg: cfg.clone(), cache })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn solve_solenoidal(&self, f: &SpectralField, h: &PlateField) -> Result<(SpectralField, SpectralField, PlateField)> {
        let grid = f.grid();
        let sols = match &self.cache {
            Some(ms) => ms.solve(f, None, h)?,
            None => solve_modes(&self.cfg, f, None, h)?,
        };
        synthesize(grid, &sols)
    }

    pub fn solve(&self, f: &SpectralField, g: &SpectralField, h: &PlateField) -> Result<LinearSolution> {
        check_grids(&self.cfg, f, g, h)?;
        let lift = lift_divergence(g, self.cfg.tol_eq)?.w;
        let (ft, ht) = reduced_data(&self.cfg, f, h, &lift);
        let steady = self.solve_solenoidal(&project_steady(&ft), &project_steady_plate(&ht))?;
        let osc = self.solve_solenoidal(&project_oscillatory(&ft), &project_oscillatory_plate(&ht))?;
        let u = &(&steady.0 + &osc.0) + &lift;
        let p = &steady.1 + &osc.1;
        let mut eta = &steady.2 + &osc.2;
        eta.remove_lateral_mean();
        let residuals = linear_residuals(&self.cfg, &u, &p, &eta, f, Some(g), h);
        Ok(LinearSolution { u, p, eta, lift, residuals })
    }
}

fn check_grids(cfg: &SolverConfig, f: &SpectralField, g: &SpectralField, h: &PlateField) -> Result<()> {
    let grid: TorusGrid = cfg.grid()?;
    if f.grid() != &grid || g.grid() != &grid || h.grid() != &grid {
        return Err(Error::Shape("data grids differ from the configured grid".into()));
    }
    if f.components() != 3 || g.components() != 1 {
        return Err(Error::Shape("f must be a vector field and g a scalar field".into()));
    }
    Ok(())
}

/// Solves the linear problem for data `(f, g, h)`; `g` must have zero slab
/// mean at every time frequency.
pub fn solve_linear_full(cfg: &SolverConfig, f: &SpectralField, g: &SpectralField, h: &PlateField) -> Result<LinearSolution> {
    LinearSolver::new(cfg, false)?.solve(f, g, h)
}

/// Empirical constant of the a priori estimate, `|(u, p, eta)|_X / |(f, g, h)|_Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRatio {
    pub solution_norm: f64,
    pub data_norm: f64,
    pub ratio: f64,
}

pub fn a_priori_ratio(
    sol: &LinearSolution,
    f: &SpectralField,
    g: &SpectralField,
    h: &PlateField,
    q: f64,
) -> Result<BoundRatio> {
    let solution_norm = x_norm(&sol.u, &sol.p, &sol.eta, q)?;
    let data_norm = y_norm(f, g, h, q)?;
    let ratio = if data_norm > 0.0 { solution_norm / data_norm } else { 0.0 };
    Ok(BoundRatio { solution_norm, data_norm, ratio })
}
