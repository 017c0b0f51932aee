use serde::Serialize;

use super::geometry::e_matrix;
use super::terms::compute_nonlinear_terms;
use crate::error::Result;
use crate::spectral::{
    gradient, negative_norm_time, s_norm, sobolev_norm, sobolev_norm_plate, NormSpec, PlateField, SpectralField,
};

/// Empirical constants of the three nonlinear estimates and of the bound on
/// the geometry matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRatios {
    /// Momentum forcing against `((1 + eps0)|u| + |grad p| + |u|^2) |eta|_S`.
    pub momentum: f64,
    /// Continuity defect against `|u| |eta|_S`.
    pub continuity: f64,
    /// Plate forcing against `(1 + eps0)(|eta|_S |u| + |u| + |p|)`.
    pub plate: f64,
    /// `|E|_{L^q}` against `|eta|_{L^q(W^{1,q})}`.
    pub geometry: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

/// `|u|_{W^{1,q}(L^q)} + |u|_{L^q(W^{2,q})}`.
pub fn parabolic_norm(u: &SpectralField, q: f64) -> Result<f64> {
    Ok(sobolev_norm(u, &NormSpec::slab(1, 0.0, q))? + sobolev_norm(u, &NormSpec::slab(0, 2.0, q))?)
}

pub fn nonlinear_bound_ratios(
    mu: f64,
    u: &SpectralField,
    p: &SpectralField,
    eta: &PlateField,
    eps0: f64,
    q: f64,
) -> Result<BoundRatios> {
    let terms = compute_nonlinear_terms(mu, u, p, eta)?;
    let un = parabolic_norm(u, q)?;
    let sn = s_norm(eta, q)?;
    let grad_p = sobolev_norm(&gradient(p), &NormSpec::slab(0, 0.0, q))?;
    let p_norm = sobolev_norm(p, &NormSpec::slab(0, 1.0, q))?;

    let rf = sobolev_norm(&terms.rf_tilde, &NormSpec::slab(0, 0.0, q))?;
    let rd = sobolev_norm(&terms.rd_tilde, &NormSpec::slab(0, 1.0, q))? + negative_norm_time(&terms.rd_tilde, 1, q)?;
    let re = sobolev_norm_plate(&terms.r_eta, &NormSpec::plate(0, 1.0 - 1.0 / q, q))?;
    let e = sobolev_norm(&e_matrix(eta)?, &NormSpec::slab(0, 0.0, q))?;
    let eta_w1 = sobolev_norm_plate(eta, &NormSpec::plate(0, 1.0, q))?;
    Ok(BoundRatios {
        momentum: ratio(rf, ((1.0 + eps0) * un + grad_p + un * un) * sn),
        continuity: ratio(rd, un * sn),
        plate: ratio(re, (1.0 + eps0) * (sn * un + un + p_norm)),
        geometry: ratio(e, eta_w1),
    })
}
