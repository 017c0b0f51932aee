//! Right inverse of the divergence on the slab with zero face values.
//!
//! Each lateral mode is handled explicitly. For `xi != 0` the field is
//! `w' = i xi phi`, `w3 = psi` with `psi` clamped at both faces and obeying
//! `(D^2 - |xi|^2)^2 psi = (D^2 - |xi|^2) D g`; then `phi = (D psi - g) / |xi|^2`
//! vanishes at both faces and the divergence is reproduced at every node.
//! On the lateral mean, `w3` is the vertical primitive of `g`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::resolvent::vertical_integral;
use crate::spectral::{divergence, gradient, negative_norm_time, sobolev_norm, Chebyshev, NormSpec, SpectralField};

type C = Complex64;

#[derive(Debug, Clone)]
pub struct LiftResult {
    pub w: SpectralField,
    /// Largest nodal `|div w - g|` over all modes.
    pub residual_div: f64,
    /// Largest `|w|` on either face.
    pub residual_bc: f64,
}

fn lift_profile(cheb: &Chebyshev, xi: [f64; 2], g: &[C]) -> [Vec<C>; 3] {
    let n = cheb.len();
    let m2 = xi[0] * xi[0] + xi[1] * xi[1];
    let (d1, d2) = (cheb.d1(), cheb.d2());
    let mut l = d2.clone();
    for i in 0..n {
        l[(i, i)] -= m2;
    }
    let l2 = &l * &l;
    let ld = &l * d1;
    let mut a = DMatrix::<C>::zeros(n, n);
    let mut b = DVector::<C>::zeros(n);
    a[(0, 0)] = C::from(1.0);
    a[(n - 1, n - 1)] = C::from(1.0);
    for j in 0..n {
        a[(1, j)] = C::from(d1[(0, j)]);
        a[(n - 2, j)] = C::from(d1[(n - 1, j)]);
    }
    b[1] = g[0];
    b[n - 2] = g[n - 1];
    for i in 2..n - 2 {
        for j in 0..n {
            a[(i, j)] = C::from(l2[(i, j)]);
            b[i] += g[j] * ld[(i, j)];
        }
    }
    // Equilibrate rows so the face conditions are not swamped by the
    // fourth-order rows, whose entries grow like N^8.
    for i in 0..n {
        let s = a.row(i).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        a.row_mut(i).unscale_mut(s);
        b[i] /= s;
    }
    let psi = a.lu().solve(&b).expect("clamped fourth-order problem is nonsingular");
    let dpsi: Vec<C> = (0..n).map(|i| (0..n).map(|j| psi[j] * d1[(i, j)]).sum()).collect();
    let mut phi: Vec<C> = dpsi.iter().zip(g).map(|(d, gv)| (d - gv) / m2).collect();
    phi[0] = C::new(0.0, 0.0);
    phi[n - 1] = C::new(0.0, 0.0);
    let mut w3: Vec<C> = psi.iter().copied().collect();
    w3[0] = C::new(0.0, 0.0);
    w3[n - 1] = C::new(0.0, 0.0);
    let i = C::new(0.0, 1.0);
    [phi.iter().map(|p| i * xi[0] * p).collect(), phi.iter().map(|p| i * xi[1] * p).collect(), w3]
}

/// Lifts a scalar field `g` to `w` with `div w = g` and `w = 0` on both faces.
/// Every time frequency must carry a lateral mean profile with zero integral.
pub fn lift_divergence(g: &SpectralField, tol: f64) -> Result<LiftResult> {
    if g.components() != 1 {
        return Err(Error::Shape("divergence lift expects a scalar field".into()));
    }
    let grid = g.grid();
    let cheb = grid.cheb();
    let scale = g.max_abs().max(1.0);
    let profiles = grid
        .modes()
        .into_par_iter()
        .map(|m| {
            let prof = g.profile(m, 0);
            if prof.iter().all(|v| v.norm() == 0.0) {
                return Ok((m, None));
            }
            if m.is_lateral_mean() {
                let mean = cheb.integrate(&prof);
                if mean.norm() > tol * scale {
                    return Err(Error::Incompatible { k: m.k, mean: mean.norm() });
                }
                let zero = vec![C::new(0.0, 0.0); prof.len()];
                Ok((m, Some([zero.clone(), zero, vertical_integral(cheb, &prof, mean)])))
            } else {
                Ok((m, Some(lift_profile(cheb, grid.wavevector(m.xi), &prof))))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = SpectralField::zeros(grid, 3);
    w.set_real(g.is_real());
    for (m, p) in profiles {
        if let Some(p) = p {
            for (c, prof) in p.iter().enumerate() {
                w.set_profile(m, c, prof);
            }
        }
    }
    let residual_div = (&divergence(&w) - g).max_abs();
    let residual_bc = face_defect(&w);
    Ok(LiftResult { w, residual_div, residual_bc })
}

/// Largest coefficient magnitude on either face.
pub fn face_defect(w: &SpectralField) -> f64 {
    let last = w.grid().n_nodes() - 1;
    w.coeffs()
        .indexed_iter()
        .filter(|((_, _, _, j, _), _)| *j == 0 || *j == last)
        .fold(0.0, |a, (_, v)| a.max(v.norm()))
}

/// Empirical constants of the lift: `|grad w|_q / |g|_q` and
/// `|w|_q / |g|_{-1,q}`. Zero data give zero ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftRatios {
    pub gradient: f64,
    pub negative: f64,
}

pub fn lift_estimate_check(g: &SpectralField, w: &SpectralField, q: f64) -> Result<LiftRatios> {
    let l0 = NormSpec::slab(0, 0.0, q);
    let gn = sobolev_norm(g, &l0)?;
    if gn == 0.0 {
        return Ok(LiftRatios { gradient: 0.0, negative: 0.0 });
    }
    let mut grad_q = 0.0;
    for c in 0..3 {
        grad_q += sobolev_norm(&gradient(&w.component(c)), &l0)?.powf(q);
    }
    let neg = negative_norm_time(g, 0, q)?;
    let wn = sobolev_norm(w, &l0)?;
    Ok(LiftRatios { gradient: grad_q.powf(1.0 / q) / gn, negative: if neg > 0.0 { wn / neg } else { 0.0 } })
}
