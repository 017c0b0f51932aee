//! Sobolev-type norms on the slab and on the plate torus.
//!
//! Every norm uses the normalized measure in `(t, x')` and Lebesgue measure
//! on `(0, 1)` in `x3`. For `q = 2` the value is an exact weighted coefficient
//! sum; other exponents apply Bessel-potential weights in coefficient space
//! and integrate `|.|^q` on an oversampled physical grid.

use nalgebra::{DMatrix, DVector};
use ndarray::s;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{PlateField, SpectralField};
use super::grid::{ModeIndex, TorusGrid};
use super::transform::{plate_to_physical, to_physical};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Slab,
    Plate,
}

/// `W^{a,q}(T; W^{s,q})` on the slab or the plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub time_order: u8,
    pub spatial_order: f64,
    pub q: f64,
    pub domain: Domain,
}

impl NormSpec {
    pub fn slab(time_order: u8, spatial_order: f64, q: f64) -> Self {
        Self { time_order, spatial_order, q, domain: Domain::Slab }
    }

    pub fn plate(time_order: u8, spatial_order: f64, q: f64) -> Self {
        Self { time_order, spatial_order, q, domain: Domain::Plate }
    }

    pub fn validate(&self) -> Result<()> {
        if self.spatial_order < -1.0 || !self.spatial_order.is_finite() {
            return Err(Error::UnsupportedOrder(self.spatial_order));
        }
        if self.time_order > 2 {
            return Err(Error::Parameters(format!("time order {} exceeds 2", self.time_order)));
        }
        if !(self.q > 1.0 && self.q.is_finite()) {
            return Err(Error::Parameters(format!("integrability exponent must lie in (1, inf), got {}", self.q)));
        }
        Ok(())
    }

    /// Number of wall-normal derivatives entering the slab norm.
    fn normal_derivatives(&self) -> usize {
        if self.spatial_order <= 0.0 {
            0
        } else {
            self.spatial_order.floor() as usize
        }
    }
}

fn time_weight(grid: &TorusGrid, k: i64, a: u8) -> f64 {
    let w = grid.omega(k);
    (1.0 + w * w).powi(a as i32)
}

fn space_weight(grid: &TorusGrid, xi: [i64; 2], s: f64) -> f64 {
    (1.0 + grid.wavenumber_sq(xi)).powf(s)
}

fn oversampled(n: usize) -> usize {
    2 * n + 1
}

/// Profiles of `d^m/dx3^m` applied to every mode and component.
fn normal_derivative(field: &SpectralField, m: usize) -> SpectralField {
    let mut out = field.clone();
    for _ in 0..m {
        out = super::transform::dz(&out, 1);
    }
    out
}

/// Slab norm of a scalar or vector field.
pub fn sobolev_norm(field: &SpectralField, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    if spec.domain != Domain::Slab {
        return Err(Error::Parameters("slab field measured with a plate norm".into()));
    }
    let grid = field.grid();
    let w = grid.cheb().weights();
    let s = spec.spatial_order;
    let mut total = 0.0;
    for m in 0..=spec.normal_derivatives() {
        let d = normal_derivative(field, m);
        let weighted = d.map_modes(|mode, _, _, v| {
            v * (time_weight(grid, mode.k, spec.time_order) * space_weight(grid, mode.xi, s - m as f64)).sqrt()
        });
        if spec.q == 2.0 {
            for ((_, _, _, j, _), v) in weighted.coeffs().indexed_iter() {
                total += w[j] * v.norm_sqr();
            }
        } else {
            total += lq_power_slab(&weighted, spec.q);
        }
    }
    Ok(total.powf(1.0 / spec.q))
}

/// `mean_{t,x'} int_0^1 |v|^q dx3` on an oversampled grid.
fn lq_power_slab(field: &SpectralField, q: f64) -> f64 {
    let g = field.grid();
    let (mt, mx) = (oversampled(g.n_t()), oversampled(g.n_x()));
    let phys = to_physical(field, mt, mx);
    let w = g.cheb().weights();
    let mut acc = 0.0;
    for it in 0..mt {
        for i1 in 0..mx {
            for i2 in 0..mx {
                for (j, wj) in w.iter().enumerate() {
                    let mag2: f64 = phys.slice(s![it, i1, i2, j, ..]).iter().map(|v| v.norm_sqr()).sum();
                    acc += wj * mag2.powf(q / 2.0);
                }
            }
        }
    }
    acc / (mt * mx * mx) as f64
}

pub fn sobolev_norm_plate(field: &PlateField, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    if spec.domain != Domain::Plate {
        return Err(Error::Parameters("plate field measured with a slab norm".into()));
    }
    let grid = field.grid();
    let weighted = field.map_modes(|m, v| {
        v * (time_weight(grid, m.k, spec.time_order) * space_weight(grid, m.xi, spec.spatial_order)).sqrt()
    });
    if spec.q == 2.0 {
        return Ok(weighted.coeffs().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt());
    }
    let (mt, mx) = (oversampled(grid.n_t()), oversampled(grid.n_x()));
    let phys = plate_to_physical(&weighted, mt, mx);
    let acc: f64 = phys.iter().map(|v| v.norm().powf(spec.q)).sum::<f64>() / phys.len() as f64;
    Ok(acc.powf(1.0 / spec.q))
}

/// Solves `-(d^2/dx3^2 - m2) phi = rhs` with homogeneous Neumann data at both
/// faces. For `m2 = 0` the constant is fixed by `int phi = 0` and a
/// multiplier absorbs any discrete incompatibility.
pub fn neumann_potential(grid: &TorusGrid, rhs: &[Complex64], m2: f64) -> Vec<Complex64> {
    let cheb = grid.cheb();
    let n = cheb.len();
    let (d1, d2) = (cheb.d1(), cheb.d2());
    let gauge = m2 == 0.0;
    let size = if gauge { n + 1 } else { n };
    let mut a = DMatrix::<Complex64>::zeros(size, size);
    let mut b = DVector::<Complex64>::zeros(size);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = if i == 0 || i == n - 1 {
                Complex64::from(d1[(i, j)])
            } else {
                Complex64::from(-d2[(i, j)] + if i == j { m2 } else { 0.0 })
            };
        }
        if i != 0 && i != n - 1 {
            b[i] = rhs[i];
        }
    }
    if gauge {
        for (j, w) in cheb.weights().iter().enumerate() {
            a[(n, j)] = Complex64::from(*w);
        }
        for i in 1..n - 1 {
            a[(i, n)] = Complex64::from(1.0);
        }
    }
    let sol = a.lu().solve(&b).expect("Neumann problem with gauge is nonsingular");
    sol.iter().take(n).copied().collect()
}

/// Potential `Phi` of the mean-free part of `g` solving the Neumann problem
/// mode by mode; its gradient is the Riesz representative of `g` in the dual
/// of the homogeneous `W^{1,2}`.
pub fn dual_potential(g: &SpectralField) -> Result<SpectralField> {
    if g.components() != 1 {
        return Err(Error::Shape("dual potential expects a scalar field".into()));
    }
    let grid = g.grid().clone();
    let mut phi = SpectralField::zeros(&grid, 1);
    phi.set_real(g.is_real());
    for m in grid.modes() {
        let mut prof = g.profile(m, 0);
        if m.is_lateral_mean() {
            let mean = grid.cheb().integrate(&prof);
            prof.iter_mut().for_each(|v| *v -= mean);
        }
        phi.set_profile(m, 0, &neumann_potential(&grid, &prof, grid.wavenumber_sq(m.xi)));
    }
    Ok(phi)
}

pub fn gradient(field: &SpectralField) -> SpectralField {
    let a = super::transform::dx(field, 0);
    let b = super::transform::dx(field, 1);
    let c = super::transform::dz(field, 1);
    SpectralField::stack([&a, &b, &c]).expect("scalar gradient")
}

/// Homogeneous dual norm of `g` evaluated at time `t`.
pub fn negative_norm(g: &SpectralField, t: f64, q: f64) -> Result<f64> {
    let grid = g.grid();
    let mut slice = g.map_modes(|_, _, _, _| Complex64::new(0.0, 0.0));
    for m in grid.modes().into_iter().filter(|m| m.k == 0) {
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.n_nodes()];
        for k in -grid.k_max()..=grid.k_max() {
            let phase = Complex64::from_polar(1.0, grid.omega(k) * t);
            for (a, v) in acc.iter_mut().zip(g.profile(ModeIndex::new(k, m.xi), 0)) {
                *a += v * phase;
            }
        }
        slice.set_profile(m, 0, &acc);
    }
    negative_norm_time(&slice, 0, q)
}

/// `W^{a,q}(T; W^{-1,q})`-type norm: the time-weighted norm of the gradient of
/// the dual potential.
pub fn negative_norm_time(g: &SpectralField, time_order: u8, q: f64) -> Result<f64> {
    let phi = dual_potential(g)?;
    sobolev_norm(&gradient(&phi), &NormSpec::slab(time_order, 0.0, q))
}

/// Norm of a solution triple: the sum of the norms of every intersected space.
pub fn x_norm(u: &SpectralField, p: &SpectralField, eta: &PlateField, q: f64) -> Result<f64> {
    Ok(sobolev_norm(u, &NormSpec::slab(1, 0.0, q))?
        + sobolev_norm(u, &NormSpec::slab(0, 2.0, q))?
        + sobolev_norm(p, &NormSpec::slab(0, 1.0, q))?
        + s_norm(eta, q)?)
}

/// Norm of a data triple `(f, g, h)`.
pub fn y_norm(f: &SpectralField, g: &SpectralField, h: &PlateField, q: f64) -> Result<f64> {
    let r = 1.0 - 1.0 / q;
    Ok(sobolev_norm(f, &NormSpec::slab(0, 0.0, q))?
        + sobolev_norm(g, &NormSpec::slab(0, 1.0, q))?
        + negative_norm_time(g, 1, q)?
        + sobolev_norm_plate(h, &NormSpec::plate(0, r, q))?)
}

/// Plate regularity norm used by the smallness gate.
pub fn s_norm(eta: &PlateField, q: f64) -> Result<f64> {
    let r = 1.0 - 1.0 / q;
    Ok(sobolev_norm_plate(eta, &NormSpec::plate(2, r, q))? + sobolev_norm_plate(eta, &NormSpec::plate(0, 4.0 + r, q))?)
}
