//! Fourier transforms in `(t, x')` and spectral differentiation.
//!
//! The forward transform averages over the torus, the inverse is the plain
//! sum over the mode lattice. Wall-normal profiles are never transformed.

use ndarray::{s, Array, Array3, Array5, Axis, Dimension};
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::chebyshev::Chebyshev;
use super::field::{PlateField, SpectralField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

fn fft_axis<D: Dimension>(a: &mut Array<Complex64, D>, axis: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    let n = a.shape()[axis];
    if n <= 1 {
        return;
    }
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for mut lane in a.lanes_mut(Axis(axis)) {
        for (b, v) in buf.iter_mut().zip(lane.iter()) {
            *b = *v;
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (v, b) in lane.iter_mut().zip(buf.iter()) {
            *v = *b;
        }
    }
}

fn fft_lattice<D: Dimension>(a: &mut Array<Complex64, D>, inverse: bool) {
    let mut planner = FftPlanner::new();
    for ax in 0..3 {
        fft_axis(a, ax, inverse, &mut planner);
    }
}

fn wrap(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// Evaluates a slab field on a uniform `m_t x m_x x m_x` sample grid
/// (zero padding when the sample grid is finer than the mode lattice).
pub fn to_physical(field: &SpectralField, m_t: usize, m_x: usize) -> Array5<Complex64> {
    let g = field.grid();
    assert!(m_t >= g.n_t() && m_x >= g.n_x(), "sample grid coarser than mode lattice");
    let (nz, nc) = (g.n_nodes(), field.components());
    let mut a = Array5::<Complex64>::zeros((m_t, m_x, m_x, nz, nc));
    for it in 0..g.n_t() {
        let wt = wrap(g.k_of(it), m_t);
        for i1 in 0..g.n_x() {
            let w1 = wrap(g.xi_of(i1), m_x);
            for i2 in 0..g.n_x() {
                let w2 = wrap(g.xi_of(i2), m_x);
                a.slice_mut(s![wt, w1, w2, .., ..]).assign(&field.coeffs().slice(s![it, i1, i2, .., ..]));
            }
        }
    }
    fft_lattice(&mut a, true);
    a
}

/// Averages uniform samples against the retained modes of `grid`. Sample
/// counts may exceed the mode counts; higher harmonics are discarded.
pub fn from_physical(samples: &Array5<Complex64>, grid: &TorusGrid) -> Result<SpectralField> {
    let sh = samples.shape().to_vec();
    if sh[0] < grid.n_t() || sh[1] < grid.n_x() || sh[2] != sh[1] || sh[3] != grid.n_nodes() {
        return Err(Error::Shape(format!("samples {:?} incompatible with grid {:?}", sh, grid)));
    }
    let real = samples.iter().all(|v| v.im == 0.0);
    let mut a = samples.clone();
    fft_lattice(&mut a, false);
    let norm = 1.0 / (sh[0] * sh[1] * sh[2]) as f64;
    let mut out = Array5::<Complex64>::zeros((grid.n_t(), grid.n_x(), grid.n_x(), sh[3], sh[4]));
    for it in 0..grid.n_t() {
        let wt = wrap(grid.k_of(it), sh[0]);
        for i1 in 0..grid.n_x() {
            let w1 = wrap(grid.xi_of(i1), sh[1]);
            for i2 in 0..grid.n_x() {
                let w2 = wrap(grid.xi_of(i2), sh[2]);
                let src = a.slice(s![wt, w1, w2, .., ..]).mapv(|v| v * norm);
                out.slice_mut(s![it, i1, i2, .., ..]).assign(&src);
            }
        }
    }
    SpectralField::from_coeffs(grid, out, real)
}

/// Samples on `t_j = jT/N_t`, `x_l = lL/N_x` (times the Chebyshev nodes) to coefficients.
pub fn forward_transform(samples: &Array5<Complex64>, grid: &TorusGrid) -> Result<SpectralField> {
    let sh = samples.shape();
    if sh[..4] != [grid.n_t(), grid.n_x(), grid.n_x(), grid.n_nodes()] || !(sh[4] == 1 || sh[4] == 3) {
        return Err(Error::Shape(format!(
            "expected samples ({}, {}, {}, {}, 1|3), got {:?}",
            grid.n_t(),
            grid.n_x(),
            grid.n_x(),
            grid.n_nodes(),
            sh
        )));
    }
    from_physical(samples, grid)
}

pub fn forward_transform_real(samples: &Array5<f64>, grid: &TorusGrid) -> Result<SpectralField> {
    forward_transform(&samples.mapv(|v| Complex64::new(v, 0.0)), grid)
}

pub fn inverse_transform(field: &SpectralField) -> Array5<Complex64> {
    to_physical(field, field.grid().n_t(), field.grid().n_x())
}

pub fn plate_to_physical(field: &PlateField, m_t: usize, m_x: usize) -> Array3<Complex64> {
    let g = field.grid();
    assert!(m_t >= g.n_t() && m_x >= g.n_x(), "sample grid coarser than mode lattice");
    let mut a = Array3::<Complex64>::zeros((m_t, m_x, m_x));
    for ((it, i1, i2), v) in field.coeffs().indexed_iter() {
        a[[wrap(g.k_of(it), m_t), wrap(g.xi_of(i1), m_x), wrap(g.xi_of(i2), m_x)]] = *v;
    }
    fft_lattice(&mut a, true);
    a
}

pub fn plate_from_physical(samples: &Array3<Complex64>, grid: &TorusGrid) -> Result<PlateField> {
    let sh = samples.shape().to_vec();
    if sh[0] < grid.n_t() || sh[1] < grid.n_x() || sh[2] != sh[1] {
        return Err(Error::Shape(format!("plate samples {:?} incompatible with grid", sh)));
    }
    let real = samples.iter().all(|v| v.im == 0.0);
    let mut a = samples.clone();
    fft_lattice(&mut a, false);
    let norm = 1.0 / (sh[0] * sh[1] * sh[2]) as f64;
    let out = Array3::from_shape_fn((grid.n_t(), grid.n_x(), grid.n_x()), |(it, i1, i2)| {
        a[[wrap(grid.k_of(it), sh[0]), wrap(grid.xi_of(i1), sh[1]), wrap(grid.xi_of(i2), sh[2])]] * norm
    });
    PlateField::from_coeffs(grid, out, real)
}

pub fn plate_forward(samples: &Array3<Complex64>, grid: &TorusGrid) -> Result<PlateField> {
    if samples.shape() != [grid.n_t(), grid.n_x(), grid.n_x()] {
        return Err(Error::Shape(format!("plate samples {:?} do not match grid", samples.shape())));
    }
    plate_from_physical(samples, grid)
}

pub fn plate_inverse(field: &PlateField) -> Array3<Complex64> {
    plate_to_physical(field, field.grid().n_t(), field.grid().n_x())
}

/// Time average: keeps only the `k = 0` modes.
pub fn project_steady(field: &SpectralField) -> SpectralField {
    field.map_modes(|m, _, _, v| if m.k == 0 { v } else { Complex64::new(0.0, 0.0) })
}

/// Purely oscillatory part: zeroes the `k = 0` modes.
pub fn project_oscillatory(field: &SpectralField) -> SpectralField {
    field.map_modes(|m, _, _, v| if m.k == 0 { Complex64::new(0.0, 0.0) } else { v })
}

pub fn project_steady_plate(field: &PlateField) -> PlateField {
    field.map_modes(|m, v| if m.k == 0 { v } else { Complex64::new(0.0, 0.0) })
}

pub fn project_oscillatory_plate(field: &PlateField) -> PlateField {
    field.map_modes(|m, v| if m.k == 0 { Complex64::new(0.0, 0.0) } else { v })
}

/// Wall-normal derivative of a nodal profile.
pub fn cheb_derivative(cheb: &Chebyshev, profile: &[Complex64], order: usize) -> Result<Vec<Complex64>> {
    if !(order == 1 || order == 2) {
        return Err(Error::Parameters(format!("derivative order must be 1 or 2, got {order}")));
    }
    if profile.len() != cheb.len() {
        return Err(Error::Shape(format!("profile has {} values, expected {}", profile.len(), cheb.len())));
    }
    Ok(cheb.differentiate(profile, order))
}

/// Values at the plate face `x3 = 0` of component `comp`.
pub fn trace_bottom(field: &SpectralField, comp: usize) -> PlateField {
    let c = field.coeffs().slice(s![.., .., .., 0, comp]).to_owned();
    PlateField::from_coeffs(field.grid(), c, field.is_real()).expect("trace shape follows grid")
}

/// Time derivative in coefficient space.
pub fn dt(field: &SpectralField) -> SpectralField {
    let g = field.grid().clone();
    field.map_modes(|m, _, _, v| v * Complex64::new(0.0, g.omega(m.k)))
}

/// Lateral derivative along `axis` (0 or 1).
pub fn dx(field: &SpectralField, axis: usize) -> SpectralField {
    let g = field.grid().clone();
    field.map_modes(|m, _, _, v| v * Complex64::new(0.0, g.wavevector(m.xi)[axis]))
}

/// Wall-normal derivative of every profile.
pub fn dz(field: &SpectralField, order: usize) -> SpectralField {
    let g = field.grid();
    let mut out = field.clone();
    let d = g.cheb().matrix(order);
    let nz = g.n_nodes();
    let src = field.coeffs();
    let dst = out.coeffs_mut();
    let sh = src.shape().to_vec();
    for it in 0..sh[0] {
        for i1 in 0..sh[1] {
            for i2 in 0..sh[2] {
                for c in 0..sh[4] {
                    for i in 0..nz {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for j in 0..nz {
                            acc += src[[it, i1, i2, j, c]] * d[(i, j)];
                        }
                        dst[[it, i1, i2, i, c]] = acc;
                    }
                }
            }
        }
    }
    out
}

/// Derivative along direction 0 (time), 1, 2 (lateral) or 3 (wall-normal).
pub fn partial(field: &SpectralField, direction: usize) -> SpectralField {
    match direction {
        0 => dt(field),
        1 | 2 => dx(field, direction - 1),
        _ => dz(field, 1),
    }
}

pub fn plate_dt(field: &PlateField) -> PlateField {
    let g = field.grid().clone();
    field.map_modes(|m, v| v * Complex64::new(0.0, g.omega(m.k)))
}

pub fn plate_dx(field: &PlateField, axis: usize) -> PlateField {
    let g = field.grid().clone();
    field.map_modes(|m, v| v * Complex64::new(0.0, g.wavevector(m.xi)[axis]))
}

/// Divergence of a three-component field.
pub fn divergence(field: &SpectralField) -> SpectralField {
    let a = dx(&field.component(0), 0);
    let b = dx(&field.component(1), 1);
    let c = dz(&field.component(2), 1);
    &(&a + &b) + &c
}

/// Extends a field to a grid with more retained modes (zero fill) or
/// truncates it to fewer.
pub fn regrid(field: &SpectralField, target: &TorusGrid) -> SpectralField {
    assert_eq!(field.grid().n_z(), target.n_z(), "regrid keeps the Chebyshev degree");
    let mut out = SpectralField::zeros(target, field.components());
    out.set_real(field.is_real());
    for m in target.modes() {
        for c in 0..field.components() {
            out.set_profile(m, c, &field.profile(m, c));
        }
    }
    out
}

pub fn regrid_plate(field: &PlateField, target: &TorusGrid) -> PlateField {
    let mut out = PlateField::from_modes(target, field.is_real(), |m| field.get(m));
    out.set_real(field.is_real());
    out
}
