use serde::Serialize;

use super::forcing::Forcing;
use super::geometry::smallness_check;
use super::terms::{compute_nonlinear_terms, slab_mean_defect, NonlinearTerms};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::linear::LinearSolver;
use crate::resolvent::{linear_residuals, ModeResiduals};
use crate::spectral::{sobolev_norm, sobolev_norm_plate, x_norm, NormSpec, PlateField, SpectralField};

#[derive(Debug, Clone, Serialize)]
pub struct PicardStep {
    pub iteration: usize,
    /// `X`-norm of the new iterate.
    pub solution_norm: f64,
    /// `X`-norm of the change from the previous iterate.
    pub increment: f64,
    /// Ratio of consecutive increments.
    pub ratio: Option<f64>,
    pub plate_norm: f64,
    pub sup_eta: f64,
    /// Slab mean of the continuity defect fed to the linear solver.
    pub divergence_mean: f64,
    /// Largest nonlinear residual of the iterate entering this step.
    pub entry_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardTrace {
    /// Size of the data, `|f|_{L^2} + |h|`.
    pub data_norm: f64,
    /// Radius `sqrt(data_norm)` of the ball the iterates must stay in.
    pub radius: f64,
    pub steps: Vec<PicardStep>,
    pub converged: bool,
}

impl PicardTrace {
    pub fn max_ratio(&self) -> f64 {
        self.steps.iter().filter_map(|s| s.ratio).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub u: SpectralField,
    pub p: SpectralField,
    pub eta: PlateField,
    pub trace: PicardTrace,
}

/// Data `(f + R_f, R_d, h + R_eta)` of the linear problem whose solution is
/// the next iterate.
pub fn fixed_point_data(
    cfg: &SolverConfig,
    forcing: &Forcing,
    h: &PlateField,
    u: &SpectralField,
    p: &SpectralField,
    eta: &PlateField,
) -> Result<(SpectralField, SpectralField, PlateField, NonlinearTerms)> {
    let terms = compute_nonlinear_terms(cfg.mu_f, u, p, eta)?;
    let f = &forcing.pulled_back(u.grid(), eta)? + &terms.rf_tilde;
    let hh = h + &terms.r_eta;
    Ok((f, terms.rd_tilde.clone(), hh, terms))
}

/// Residuals of the full nonlinear system at `(u, p, eta)`: the linear
/// residuals with the nonlinear terms moved to the data side, plus the
/// plate mean.
pub fn nonlinear_residual(
    cfg: &SolverConfig,
    u: &SpectralField,
    p: &SpectralField,
    eta: &PlateField,
    forcing: &Forcing,
    h: &PlateField,
) -> Result<ModeResiduals> {
    let (f, g, hh, _) = fixed_point_data(cfg, forcing, h, u, p, eta)?;
    let mut r = linear_residuals(cfg, u, p, eta, &f, Some(&g), &hh);
    r.plate = r.plate.max(eta.lateral_mean_defect());
    Ok(r)
}

/// Fixed-point iteration `x_{n+1} = S(f + R_f(x_n), R_d(x_n), h + R_eta(x_n))`
/// from `x_0 = 0`, with `S` the linear solution operator.
pub fn picard_solve(cfg: &SolverConfig, forcing: &Forcing, h: &PlateField) -> Result<PicardSolution> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let solver = LinearSolver::new(cfg, true)?;
    let mut u = SpectralField::zeros(&grid, 3);
    let mut p = SpectralField::zeros(&grid, 1);
    let mut eta = PlateField::zeros(&grid);
    u.set_real(true);
    p.set_real(true);
    eta.set_real(true);

    let f0 = forcing.pulled_back(&grid, &eta)?;
    let data_norm = sobolev_norm(&f0, &NormSpec::slab(0, 0.0, 2.0))? + sobolev_norm_plate(h, &NormSpec::plate(0, 0.5, 2.0))?;
    let radius = data_norm.sqrt();
    let mut trace = PicardTrace { data_norm, radius, steps: Vec::new(), converged: false };
    let mut previous: Option<f64> = None;

    for iteration in 1..=cfg.max_iter {
        let gate = smallness_check(&eta, cfg.eps0)?;
        if !gate.passed {
            return Err(Error::DegenerateDeformation(format!(
                "smallness gate failed before step {iteration}: {}",
                gate.violations.join("; ")
            )));
        }
        let (f, g, hh, _) = fixed_point_data(cfg, forcing, h, &u, &p, &eta)?;
        let divergence_mean = slab_mean_defect(&g);
        let entry_residual = linear_residuals(cfg, &u, &p, &eta, &f, Some(&g), &hh).max().max(eta.lateral_mean_defect());
        let next = solver.solve(&f, &g, &hh)?;
        let increment = x_norm(&(&next.u - &u), &(&next.p - &p), &(&next.eta - &eta), 2.0)?;
        let solution_norm = x_norm(&next.u, &next.p, &next.eta, 2.0)?;
        let ratio = previous.filter(|&d| d > 0.0).map(|d| increment / d);
        trace.steps.push(PicardStep {
            iteration,
            solution_norm,
            increment,
            ratio,
            plate_norm: gate.s_norm,
            sup_eta: gate.sup_eta,
            divergence_mean,
            entry_residual,
        });
        u = next.u;
        p = next.p;
        eta = next.eta;
        if solution_norm > radius {
            return Err(Error::Divergence {
                step: iteration,
                reason: format!("iterate norm {solution_norm:.3e} left the ball of radius {radius:.3e}; trace {}", summary(&trace)),
            });
        }
        if let Some(r) = ratio {
            if r >= 1.0 {
                return Err(Error::Divergence {
                    step: iteration,
                    reason: format!("contraction ratio {r:.3} >= 1; trace {}", summary(&trace)),
                });
            }
        }
        if increment <= cfg.picard_tol * solution_norm || increment == 0.0 {
            trace.converged = true;
            return Ok(PicardSolution { u, p, eta, trace });
        }
        previous = Some(increment);
    }
    Err(Error::Divergence {
        step: cfg.max_iter,
        reason: format!("no convergence within {} iterations; trace {}", cfg.max_iter, summary(&trace)),
    })
}

fn summary(trace: &PicardTrace) -> String {
    serde_json::to_string(&trace.steps.iter().map(|s| (s.increment, s.ratio)).collect::<Vec<_>>())
        .unwrap_or_default()
}
