use ndarray::{s, Array3, Array5};

use super::geometry::{plate_coeffs, plate_samples, slab_coeffs, Deformation};
use super::pointwise::PointState;
use crate::error::{Error, Result};
use crate::spectral::{
    divergence, dx, dz, plate_dt, plate_dx, to_physical, PlateField, SpectralField, TorusGrid,
};

/// Nonlinear forcing of the reference-frame system, truncated to the grid of
/// the unknowns.
#[derive(Debug, Clone)]
pub struct NonlinearTerms {
    /// Momentum forcing, including `-(u . grad) u`.
    pub rf_tilde: SpectralField,
    /// Continuity defect, the divergence of `rd_vector`.
    pub rd_tilde: SpectralField,
    pub rd_vector: SpectralField,
    /// Plate forcing.
    pub r_eta: PlateField,
    /// Geometric stress correction at the plate, entry `(i, j)` at `3 i + j`.
    pub s_eta: Vec<PlateField>,
}

pub(crate) fn slab_samples(field: &SpectralField, m_t: usize, m_x: usize) -> Array5<f64> {
    to_physical(field, m_t, m_x).mapv(|v| v.re)
}

/// Physical samples of everything a [`PointState`] needs.
pub(crate) struct Samples {
    pub grid: TorusGrid,
    pub m_t: usize,
    pub m_x: usize,
    u: Array5<f64>,
    du: [Array5<f64>; 3],
    du3: [Array5<f64>; 3],
    p: Array5<f64>,
    dp3: Array5<f64>,
    eta: Array3<f64>,
    eta_t: Array3<f64>,
    eta_x: [Array3<f64>; 2],
    eta_xx: [Array3<f64>; 2],
}

impl Samples {
    pub fn new(u: &SpectralField, p: &SpectralField, eta: &PlateField) -> Result<Self> {
        let grid = u.grid().clone();
        if u.components() != 3 || p.components() != 1 || p.grid() != &grid || eta.grid() != &grid {
            return Err(Error::Shape("nonlinear terms need (u, p, eta) on one grid".into()));
        }
        let pad = grid.padded();
        let (m_t, m_x) = (pad.n_t(), pad.n_x());
        let sl = |f: &SpectralField| slab_samples(f, m_t, m_x);
        let pl = |f: &PlateField| plate_samples(f, m_t, m_x);
        let grads = [dx(u, 0), dx(u, 1), dz(u, 1)];
        Ok(Self {
            u: sl(u),
            du: [sl(&grads[0]), sl(&grads[1]), sl(&grads[2])],
            du3: [sl(&dz(&grads[0], 1)), sl(&dz(&grads[1], 1)), sl(&dz(u, 2))],
            p: sl(p),
            dp3: sl(&dz(p, 1)),
            eta: pl(eta),
            eta_t: pl(&plate_dt(eta)),
            eta_x: [pl(&plate_dx(eta, 0)), pl(&plate_dx(eta, 1))],
            eta_xx: [pl(&plate_dx(&plate_dx(eta, 0), 0)), pl(&plate_dx(&plate_dx(eta, 1), 1))],
            grid,
            m_t,
            m_x,
        })
    }

    pub fn state(&self, it: usize, i1: usize, i2: usize, j: usize) -> PointState {
        let q = [it, i1, i2];
        let mut st = PointState {
            x3: self.grid.nodes()[j],
            eta: self.eta[q],
            eta_t: self.eta_t[q],
            eta_x: [self.eta_x[0][q], self.eta_x[1][q]],
            eta_xx: [self.eta_xx[0][q], self.eta_xx[1][q]],
            p: self.p[[it, i1, i2, j, 0]],
            dp3: self.dp3[[it, i1, i2, j, 0]],
            ..Default::default()
        };
        for i in 0..3 {
            st.u[i] = self.u[[it, i1, i2, j, i]];
            for k in 0..3 {
                st.du[i][k] = self.du[k][[it, i1, i2, j, i]];
                st.du3[i][k] = self.du3[k][[it, i1, i2, j, i]];
            }
        }
        st
    }
}

/// Evaluates all nonlinear terms pseudospectrally: products on the padded
/// sample grid, then truncation to the retained modes.
pub fn compute_nonlinear_terms(mu: f64, u: &SpectralField, p: &SpectralField, eta: &PlateField) -> Result<NonlinearTerms> {
    Deformation::new(eta)?;
    let smp = Samples::new(u, p, eta)?;
    let (mt, mx, nz) = (smp.m_t, smp.m_x, smp.grid.n_nodes());
    let mut rf = Array5::<f64>::zeros((mt, mx, mx, nz, 3));
    let mut rd = Array5::<f64>::zeros((mt, mx, mx, nz, 3));
    let mut plate = Array3::<f64>::zeros((mt, mx, mx));
    let mut stress = ndarray::Array4::<f64>::zeros((mt, mx, mx, 9));
    for it in 0..mt {
        for i1 in 0..mx {
            for i2 in 0..mx {
                for j in 0..nz {
                    let st = smp.state(it, i1, i2, j);
                    let (m, v) = (st.momentum(mu), st.divergence_vector());
                    for c in 0..3 {
                        rf[[it, i1, i2, j, c]] = m[c];
                        rd[[it, i1, i2, j, c]] = v[c];
                    }
                    if j == 0 {
                        plate[[it, i1, i2]] = st.plate_forcing(mu);
                        for (c, v) in st.boundary_stress(mu).iter().flatten().enumerate() {
                            stress[[it, i1, i2, c]] = *v;
                        }
                    }
                }
            }
        }
    }
    let grid = &smp.grid;
    let rd_vector = slab_coeffs(&rd, grid);
    let s_eta = (0..9).map(|c| plate_coeffs(&stress.slice(s![.., .., .., c]).to_owned(), grid)).collect();
    Ok(NonlinearTerms {
        rf_tilde: slab_coeffs(&rf, grid),
        rd_tilde: divergence(&rd_vector),
        rd_vector,
        r_eta: plate_coeffs(&plate, grid),
        s_eta,
    })
}

/// Continuity of a scalar field on the slab: largest `|int_Omega g|` over time
/// frequencies.
pub fn slab_mean_defect(g: &SpectralField) -> f64 {
    let grid = g.grid();
    (-grid.k_max()..=grid.k_max())
        .map(|k| grid.cheb().integrate(&g.profile(crate::ModeIndex::new(k, [0, 0]), 0)).norm())
        .fold(0.0, f64::max)
}

