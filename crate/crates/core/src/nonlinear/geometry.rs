use ndarray::{Array3, Array5};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{
    from_physical, plate_dx, plate_from_physical, plate_to_physical, s_norm, PlateField, SpectralField, TorusGrid,
};

/// Value of a plate field at an arbitrary point, by direct summation.
pub fn plate_value(eta: &PlateField, t: f64, x: [f64; 2]) -> f64 {
    let g = eta.grid();
    g.modes()
        .into_iter()
        .fold(Complex64::new(0.0, 0.0), |acc, m| {
            let xi = g.wavevector(m.xi);
            acc + eta.get(m) * Complex64::from_polar(1.0, g.omega(m.k) * t + xi[0] * x[0] + xi[1] * x[1])
        })
        .re
}

/// Real samples of a plate field on a uniform `m_t x m_x x m_x` grid.
pub(crate) fn plate_samples(eta: &PlateField, m_t: usize, m_x: usize) -> Array3<f64> {
    plate_to_physical(eta, m_t, m_x).mapv(|v| v.re)
}

pub(crate) fn plate_coeffs(samples: &Array3<f64>, grid: &TorusGrid) -> PlateField {
    let mut out = plate_from_physical(&samples.mapv(|v| Complex64::new(v, 0.0)), grid).expect("sample grid covers modes");
    out.symmetrize();
    out
}

pub(crate) fn slab_coeffs(samples: &Array5<f64>, grid: &TorusGrid) -> SpectralField {
    let mut out = from_physical(&samples.mapv(|v| Complex64::new(v, 0.0)), grid).expect("sample grid covers modes");
    out.symmetrize();
    out
}

/// Largest `|eta|` over a twice-oversampled grid.
pub fn sup_abs(eta: &PlateField) -> f64 {
    let g = eta.grid();
    plate_samples(eta, 2 * g.n_t() + 1, 2 * g.n_x() + 1).iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// The map from the reference slab onto the deformed fluid domain.
#[derive(Debug, Clone)]
pub struct Deformation {
    eta: PlateField,
    sup: f64,
}

impl Deformation {
    pub fn new(eta: &PlateField) -> Result<Self> {
        let sup = sup_abs(eta);
        if sup >= 1.0 {
            return Err(Error::DegenerateDeformation(format!("sup |eta| = {sup} >= 1")));
        }
        Ok(Self { eta: eta.clone(), sup })
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    /// `(x', x3 - (1 - x3) eta(t, x'))`.
    pub fn map(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let e = plate_value(&self.eta, t, [x[0], x[1]]);
        [x[0], x[1], x[2] - (1.0 - x[2]) * e]
    }

    /// `(y', (y3 + eta) / (1 + eta))`.
    pub fn inverse(&self, t: f64, y: [f64; 3]) -> [f64; 3] {
        let e = plate_value(&self.eta, t, [y[0], y[1]]);
        [y[0], y[1], (y[2] + e) / (1.0 + e)]
    }
}

pub fn deform_map(eta: &PlateField, t: f64, x: [f64; 3]) -> Result<[f64; 3]> {
    Ok(Deformation::new(eta)?.map(t, x))
}

pub fn deform_inverse(eta: &PlateField, t: f64, y: [f64; 3]) -> Result<[f64; 3]> {
    Ok(Deformation::new(eta)?.inverse(t, y))
}

/// Geometry matrix on the slab as a nine-component field, entry `(i, j)`
/// stored in component `3 i + j`. Only the third row is nonzero.
pub fn e_matrix(eta: &PlateField) -> Result<SpectralField> {
    Deformation::new(eta)?;
    let grid = eta.grid();
    let pad = grid.padded();
    let (mt, mx) = (pad.n_t(), pad.n_x());
    let e = plate_samples(eta, mt, mx);
    let ex = [plate_samples(&plate_dx(eta, 0), mt, mx), plate_samples(&plate_dx(eta, 1), mt, mx)];
    let nodes = grid.nodes();
    let mut out = Array5::<f64>::zeros((mt, mx, mx, nodes.len(), 9));
    for ((it, i1, i2), &v) in e.indexed_iter() {
        let d = 1.0 + v;
        for (j, &x3) in nodes.iter().enumerate() {
            let rho = 1.0 - x3;
            out[[it, i1, i2, j, 6]] = rho * ex[0][[it, i1, i2]] / d;
            out[[it, i1, i2, j, 7]] = rho * ex[1][[it, i1, i2]] / d;
            out[[it, i1, i2, j, 8]] = -v / d;
        }
    }
    Ok(slab_coeffs(&out, grid))
}

/// Unit normal of the deformed plate: point samples on the dealiasing grid
/// and the truncated coefficients of each component.
#[derive(Debug, Clone)]
pub struct NormalField {
    /// `(t, x1, x2, component)`.
    pub samples: ndarray::Array4<f64>,
    pub components: [PlateField; 3],
}

pub fn normal_vector(eta: &PlateField) -> NormalField {
    let grid = eta.grid();
    let pad = grid.padded();
    let (mt, mx) = (pad.n_t(), pad.n_x());
    let ex = [plate_samples(&plate_dx(eta, 0), mt, mx), plate_samples(&plate_dx(eta, 1), mt, mx)];
    let mut samples = ndarray::Array4::<f64>::zeros((mt, mx, mx, 3));
    for ((it, i1, i2), &a) in ex[0].indexed_iter() {
        let b = ex[1][[it, i1, i2]];
        let s = (1.0 + a * a + b * b).sqrt();
        samples[[it, i1, i2, 0]] = -a / s;
        samples[[it, i1, i2, 1]] = -b / s;
        samples[[it, i1, i2, 2]] = -1.0 / s;
    }
    let comp = |c: usize| plate_coeffs(&samples.index_axis(ndarray::Axis(3), c).to_owned(), grid);
    NormalField { components: [comp(0), comp(1), comp(2)], samples }
}

/// Outcome of the smallness gate.
#[derive(Debug, Clone, Serialize)]
pub struct SmallnessReport {
    pub s_norm: f64,
    pub eps0: f64,
    pub sup_eta: f64,
    /// `sup 1 / (1 + eta)`, infinite when `1 + eta` reaches zero.
    pub sup_inverse: f64,
    pub passed: bool,
    /// `eps0 - s_norm`.
    pub margin: f64,
    pub violations: Vec<String>,
}

/// Checks the plate norm against `eps0` together with the point-wise bounds
/// `sup |eta| <= 1/2` and `sup 1/(1 + eta) <= 2`.
pub fn smallness_check(eta: &PlateField, eps0: f64) -> Result<SmallnessReport> {
    let g = eta.grid();
    let samples = plate_samples(eta, 2 * g.n_t() + 1, 2 * g.n_x() + 1);
    let sup_eta = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min_one_plus = samples.iter().fold(f64::INFINITY, |a, v| a.min(1.0 + v));
    let sup_inverse = if min_one_plus > 0.0 { 1.0 / min_one_plus } else { f64::INFINITY };
    let s = s_norm(eta, 2.0)?;
    let mut violations = Vec::new();
    if s > eps0 {
        violations.push(format!("plate norm {s:.6e} exceeds eps0 = {eps0:.6e}"));
    }
    if sup_eta > 0.5 {
        violations.push(format!("sup |eta| = {sup_eta:.6} exceeds 1/2"));
    }
    if sup_inverse > 2.0 {
        violations.push(format!("sup 1/(1 + eta) = {sup_inverse:.6} exceeds 2"));
    }
    Ok(SmallnessReport {
        s_norm: s,
        eps0,
        sup_eta,
        sup_inverse,
        passed: violations.is_empty(),
        margin: eps0 - s,
        violations,
    })
}
