use ndarray::{s, Array3, Array5, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use super::grid::{ModeIndex, TorusGrid};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients of a scalar or vector field on the slab, indexed
/// `(k, xi1, xi2, node, component)` with signed indices stored in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Array5<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(grid: &TorusGrid, components: usize) -> Self {
        let shape = (grid.n_t(), grid.n_x(), grid.n_x(), grid.n_nodes(), components);
        Self { grid: grid.clone(), coeffs: Array5::zeros(shape), real: true }
    }

    pub fn from_coeffs(grid: &TorusGrid, coeffs: Array5<Complex64>, real: bool) -> Result<Self> {
        let sh = coeffs.shape();
        let expected = [grid.n_t(), grid.n_x(), grid.n_x(), grid.n_nodes()];
        if sh[..4] != expected || sh[4] == 0 {
            return Err(Error::Shape(format!(
                "coefficient tensor {:?} does not match grid {:?} with at least one component",
                sh, expected
            )));
        }
        Ok(Self { grid: grid.clone(), coeffs, real })
    }

    /// Builds a field mode by mode from a closure returning the component
    /// profiles at every Chebyshev node.
    pub fn from_modes<F>(grid: &TorusGrid, components: usize, real: bool, mut profile: F) -> Self
    where
        F: FnMut(ModeIndex, usize, usize) -> Complex64,
    {
        let mut out = Self::zeros(grid, components);
        out.real = real;
        for ((it, i1, i2, j, c), v) in out.coeffs.indexed_iter_mut() {
            let m = ModeIndex::new(grid.k_of(it), [grid.xi_of(i1), grid.xi_of(i2)]);
            *v = profile(m, j, c);
        }
        out
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.coeffs.shape()[4]
    }

    pub fn coeffs(&self) -> &Array5<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array5<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array5<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    fn slot(&self, m: ModeIndex) -> Option<(usize, usize, usize)> {
        Some((self.grid.k_index(m.k)?, self.grid.xi_index(m.xi[0])?, self.grid.xi_index(m.xi[1])?))
    }

    /// Profile of one component at mode `m`; zero outside the retained lattice.
    pub fn profile(&self, m: ModeIndex, comp: usize) -> Vec<Complex64> {
        match self.slot(m) {
            Some((a, b, c)) => self.coeffs.slice(s![a, b, c, .., comp]).to_vec(),
            None => vec![ZERO; self.grid.n_nodes()],
        }
    }

    pub fn set_profile(&mut self, m: ModeIndex, comp: usize, values: &[Complex64]) {
        if let Some((a, b, c)) = self.slot(m) {
            for (dst, &v) in self.coeffs.slice_mut(s![a, b, c, .., comp]).iter_mut().zip(values) {
                *dst = v;
            }
        }
    }

    pub fn get(&self, m: ModeIndex, node: usize, comp: usize) -> Complex64 {
        self.slot(m).map_or(ZERO, |(a, b, c)| self.coeffs[[a, b, c, node, comp]])
    }

    pub fn set(&mut self, m: ModeIndex, node: usize, comp: usize, v: Complex64) {
        if let Some((a, b, c)) = self.slot(m) {
            self.coeffs[[a, b, c, node, comp]] = v;
        }
    }

    /// Scalar field holding component `c`.
    pub fn component(&self, c: usize) -> SpectralField {
        let coeffs = self.coeffs.slice(s![.., .., .., .., c..c + 1]).to_owned();
        Self { grid: self.grid.clone(), coeffs, real: self.real }
    }

    /// Stacks three scalar fields into a vector field.
    pub fn stack(parts: [&SpectralField; 3]) -> Result<SpectralField> {
        let grid = parts[0].grid.clone();
        if parts.iter().any(|p| p.grid != grid || p.components() != 1) {
            return Err(Error::Shape("stack expects three scalar fields on one grid".into()));
        }
        let views: Vec<_> = parts.iter().map(|p| p.coeffs.view()).collect();
        let coeffs = ndarray::concatenate(Axis(4), &views).map_err(|e| Error::Shape(e.to_string()))?;
        Ok(Self { grid, coeffs, real: parts.iter().all(|p| p.real) })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    pub fn map_modes<F>(&self, mut f: F) -> SpectralField
    where
        F: FnMut(ModeIndex, usize, usize, Complex64) -> Complex64,
    {
        let mut out = self.clone();
        for ((it, i1, i2, j, c), v) in out.coeffs.indexed_iter_mut() {
            let m = ModeIndex::new(self.grid.k_of(it), [self.grid.xi_of(i1), self.grid.xi_of(i2)]);
            *v = f(m, j, c, *v);
        }
        out
    }

    /// Largest violation of `c(-k, -xi) = conj c(k, xi)` relative to the field size.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        conj_defect(self.coeffs.view().into_dyn(), 3)
    }

    /// Replaces the coefficients by their conjugate-symmetric part, which is
    /// the spectrum of the real part of the physical field.
    pub fn symmetrize(&mut self) {
        let flipped = flip3(&self.coeffs);
        self.coeffs = (&self.coeffs + &flipped.mapv(|v| v.conj())) * 0.5;
        self.real = true;
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        Self { grid: self.grid.clone(), coeffs: &self.coeffs * a, real: self.real }
    }

    fn check_compatible(&self, other: &SpectralField) {
        assert!(
            self.grid == other.grid && self.components() == other.components(),
            "field arithmetic on mismatched grids"
        );
    }
}

fn flip3(a: &Array5<Complex64>) -> Array5<Complex64> {
    a.slice(s![..;-1, ..;-1, ..;-1, .., ..]).to_owned()
}

fn conj_defect(a: ndarray::ArrayViewD<'_, Complex64>, lattice_axes: usize) -> f64 {
    let mut flipped = a.to_owned();
    for ax in 0..lattice_axes {
        flipped.invert_axis(Axis(ax));
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    a.iter().zip(flipped.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y.conj()).norm())) / scale
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.check_compatible(rhs);
        SpectralField { grid: self.grid.clone(), coeffs: &self.coeffs + &rhs.coeffs, real: self.real && rhs.real }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.check_compatible(rhs);
        SpectralField { grid: self.grid.clone(), coeffs: &self.coeffs - &rhs.coeffs, real: self.real && rhs.real }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, a: f64) -> SpectralField {
        self.scaled(a)
    }
}

/// Coefficients of a field on the plate torus, indexed `(k, xi1, xi2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateField {
    grid: TorusGrid,
    coeffs: Array3<Complex64>,
    real: bool,
}

impl PlateField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        Self { grid: grid.clone(), coeffs: Array3::zeros((grid.n_t(), grid.n_x(), grid.n_x())), real: true }
    }

    pub fn from_coeffs(grid: &TorusGrid, coeffs: Array3<Complex64>, real: bool) -> Result<Self> {
        if coeffs.shape() != [grid.n_t(), grid.n_x(), grid.n_x()] {
            return Err(Error::Shape(format!("plate coefficients {:?} do not match grid", coeffs.shape())));
        }
        Ok(Self { grid: grid.clone(), coeffs, real })
    }

    pub fn from_modes<F>(grid: &TorusGrid, real: bool, mut f: F) -> Self
    where
        F: FnMut(ModeIndex) -> Complex64,
    {
        let mut out = Self::zeros(grid);
        out.real = real;
        for ((it, i1, i2), v) in out.coeffs.indexed_iter_mut() {
            *v = f(ModeIndex::new(grid.k_of(it), [grid.xi_of(i1), grid.xi_of(i2)]));
        }
        out
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array3<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    pub fn get(&self, m: ModeIndex) -> Complex64 {
        match (self.grid.k_index(m.k), self.grid.xi_index(m.xi[0]), self.grid.xi_index(m.xi[1])) {
            (Some(a), Some(b), Some(c)) => self.coeffs[[a, b, c]],
            _ => ZERO,
        }
    }

    pub fn set(&mut self, m: ModeIndex, v: Complex64) {
        if let (Some(a), Some(b), Some(c)) =
            (self.grid.k_index(m.k), self.grid.xi_index(m.xi[0]), self.grid.xi_index(m.xi[1]))
        {
            self.coeffs[[a, b, c]] = v;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    /// Largest `|coeff(k, 0)|`; zero for plate fields with vanishing lateral mean.
    pub fn lateral_mean_defect(&self) -> f64 {
        let c = self.grid.xi_max() as usize;
        self.coeffs.slice(s![.., c, c]).iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    pub fn remove_lateral_mean(&mut self) {
        let c = self.grid.xi_max() as usize;
        self.coeffs.slice_mut(s![.., c, c]).fill(ZERO);
    }

    pub fn conjugate_symmetry_defect(&self) -> f64 {
        conj_defect(self.coeffs.view().into_dyn(), 3)
    }

    pub fn symmetrize(&mut self) {
        let flipped = self.coeffs.slice(s![..;-1, ..;-1, ..;-1]).mapv(|v| v.conj());
        self.coeffs = (&self.coeffs + &flipped) * 0.5;
        self.real = true;
    }

    pub fn map_modes<F>(&self, mut f: F) -> PlateField
    where
        F: FnMut(ModeIndex, Complex64) -> Complex64,
    {
        let mut out = self.clone();
        for ((it, i1, i2), v) in out.coeffs.indexed_iter_mut() {
            *v = f(ModeIndex::new(self.grid.k_of(it), [self.grid.xi_of(i1), self.grid.xi_of(i2)]), *v);
        }
        out
    }

    pub fn scaled(&self, a: f64) -> PlateField {
        Self { grid: self.grid.clone(), coeffs: &self.coeffs * a, real: self.real }
    }
}

impl Add for &PlateField {
    type Output = PlateField;
    fn add(self, rhs: &PlateField) -> PlateField {
        assert!(self.grid == rhs.grid, "plate arithmetic on mismatched grids");
        PlateField { grid: self.grid.clone(), coeffs: &self.coeffs + &rhs.coeffs, real: self.real && rhs.real }
    }
}

impl Sub for &PlateField {
    type Output = PlateField;
    fn sub(self, rhs: &PlateField) -> PlateField {
        assert!(self.grid == rhs.grid, "plate arithmetic on mismatched grids");
        PlateField { grid: self.grid.clone(), coeffs: &self.coeffs - &rhs.coeffs, real: self.real && rhs.real }
    }
}

/// Plain serialisable view of a field used by the JSON mirror.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldRecord {
    pub n_t: usize,
    pub n_x: usize,
    pub n_z: usize,
    pub components: usize,
    pub real: bool,
    pub period_t: f64,
    pub period_x: f64,
    /// `(re, im)` pairs in `(k, xi1, xi2, node, component)` order.
    pub coeffs: Vec<[f64; 2]>,
}
