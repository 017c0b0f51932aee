use num_complex::Complex64;
use serde::Serialize;

use super::mode::{ModeData, ModeParams, ModeSolution};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::spectral::{Chebyshev, ModeIndex, TorusGrid};

type C = Complex64;
const I: C = C::new(0.0, 1.0);

/// Divergence-free test pair `(w, zeta)` with `w(1) = 0` and
/// `w(0) = -i k zeta e3`, given by nodal values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestPair {
    pub mode: ModeIndex,
    pub w: [Vec<C>; 3],
    pub zeta: C,
}

fn poly(coeffs: &[C], x: f64) -> (C, C) {
    let mut v = C::new(0.0, 0.0);
    let mut d = C::new(0.0, 0.0);
    for a in coeffs.iter().rev() {
        d = d * x + v;
        v = v * x + a;
    }
    (v, d)
}

impl TestPair {
    /// Builds a pair from a stream function. The vertical component is
    /// `psi = -i k zeta (1 - 3x^2 + 2x^3) + x^2 (1-x)^2 P(x)`, the component
    /// along `xi` follows from the divergence constraint and the component
    /// across `xi` is `x (1-x) Q(x)`. On the lateral mean `zeta` must vanish and
    /// both tangential components are free bubbles.
    pub fn from_stream(grid: &TorusGrid, mode: ModeIndex, zeta: C, p: &[C], q: &[C]) -> Result<Self> {
        let n = grid.n_nodes();
        let omega = grid.omega(mode.k);
        let xi = grid.wavevector(mode.xi);
        let m = grid.wavenumber_sq(mode.xi).sqrt();
        let mut w = [vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n]];
        if m == 0.0 {
            if zeta != C::new(0.0, 0.0) {
                return Err(Error::Parameters("plate test amplitude must vanish on the lateral mean".into()));
            }
            for (j, &x) in grid.nodes().iter().enumerate() {
                let bubble = x * (1.0 - x);
                w[0][j] = bubble * poly(p, x).0;
                w[1][j] = bubble * poly(q, x).0;
            }
            return Ok(Self { mode, w, zeta });
        }
        let (e, e_perp) = ([xi[0] / m, xi[1] / m], [-xi[1] / m, xi[0] / m]);
        let c0 = -I * omega * zeta;
        for (j, &x) in grid.nodes().iter().enumerate() {
            let (pv, pd) = poly(p, x);
            let b2 = x * x * (1.0 - x) * (1.0 - x);
            let b2d = 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
            let psi = c0 * (1.0 - 3.0 * x * x + 2.0 * x * x * x) + b2 * pv;
            let dpsi = c0 * (6.0 * x * x - 6.0 * x) + b2d * pv + b2 * pd;
            let along = I * dpsi / m;
            let across = x * (1.0 - x) * poly(q, x).0;
            for c in 0..2 {
                w[c][j] = along * e[c] + across * e_perp[c];
            }
            w[2][j] = psi;
        }
        Ok(Self { mode, w, zeta })
    }

    /// Largest violation of the face conditions and of `div w = 0` at the nodes.
    pub fn constraint_defect(&self, grid: &TorusGrid) -> f64 {
        let n = grid.n_nodes();
        let omega = grid.omega(self.mode.k);
        let xi = grid.wavevector(self.mode.xi);
        let d3 = grid.cheb().differentiate(&self.w[2], 1);
        let mut defect = (self.w[2][0] + I * omega * self.zeta).norm();
        for c in 0..3 {
            defect = defect.max(self.w[c][n - 1].norm());
        }
        defect = defect.max(self.w[0][0].norm()).max(self.w[1][0].norm());
        for j in 0..n {
            let div = I * xi[0] * self.w[0][j] + I * xi[1] * self.w[1][j] + d3[j];
            defect = defect.max(div.norm());
        }
        defect
    }
}

/// Integrates products of nodal polynomials exactly by moving to a grid of
/// twice the degree.
struct FineQuadrature {
    coarse: Chebyshev,
    fine: Chebyshev,
}

impl FineQuadrature {
    fn new(cheb: &Chebyshev) -> Self {
        Self { coarse: cheb.clone(), fine: Chebyshev::new(2 * cheb.degree()) }
    }

    fn lift(&self, v: &[C]) -> Vec<C> {
        self.coarse.resample(v, &self.fine)
    }

    fn inner(&self, a: &[C], b: &[C]) -> C {
        let (fa, fb) = (self.lift(a), self.lift(b));
        let prod: Vec<C> = fa.iter().zip(&fb).map(|(x, y)| x * y.conj()).collect();
        self.fine.integrate(&prod)
    }
}

/// Sesquilinear form of the weak resolvent problem with viscosities restored:
/// `int mu grad u : grad conj(w) + i k u . conj(w)` plus the plate part
/// `(i k^3 - i k |xi|^4 + k^2 mu_s |xi|^2) eta conj(zeta)`.
pub fn weak_form_b(grid: &TorusGrid, cfg: &SolverConfig, sol: &ModeSolution, test: &TestPair) -> C {
    let par = ModeParams::new(grid, cfg, sol.mode);
    let quad = FineQuadrature::new(grid.cheb());
    let cheb = grid.cheb();
    let mut acc = C::new(0.0, 0.0);
    for c in 0..3 {
        let uu = quad.inner(&sol.u[c], &test.w[c]);
        let du = cheb.differentiate(&sol.u[c], 1);
        let dw = cheb.differentiate(&test.w[c], 1);
        acc += par.mu_f * (par.m2 * uu + quad.inner(&du, &dw)) + I * par.omega * uu;
    }
    let w = par.omega;
    let plate = C::new(w * w * par.mu_s * par.m2, w * w * w - w * par.m2 * par.m2);
    acc + plate * sol.eta * test.zeta.conj()
}

/// Right-hand side `int f . conj(w) - i k h conj(zeta)` of the weak problem.
pub fn weak_form_rhs(grid: &TorusGrid, mode: ModeIndex, data: &ModeData, test: &TestPair) -> C {
    let quad = FineQuadrature::new(grid.cheb());
    let mut acc = C::new(0.0, 0.0);
    for c in 0..3 {
        acc += quad.inner(&data.f[c], &test.w[c]);
    }
    acc - I * grid.omega(mode.k) * data.h * test.zeta.conj()
}

/// Ratio of the per-frequency energy norm of the solution to the size of the
/// data, over all lateral modes of one time frequency `k != 0`.
pub fn energy_estimate_check(grid: &TorusGrid, sols: &[ModeSolution], data: &[ModeData]) -> Result<f64> {
    let k = match sols.first() {
        Some(s) => s.mode.k,
        None => return Ok(0.0),
    };
    if k == 0 {
        return Err(Error::WrongEntryPoint);
    }
    if sols.len() != data.len() || sols.iter().any(|s| s.mode.k != k) {
        return Err(Error::Shape("one solution per data entry at a single time frequency expected".into()));
    }
    let cheb = grid.cheb();
    let omega = grid.omega(k);
    let (mut u2, mut eta2, mut keta2, mut f2, mut h2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (s, d) in sols.iter().zip(data) {
        let m2 = grid.wavenumber_sq(s.mode.xi);
        for c in 0..3 {
            let du = cheb.differentiate(&s.u[c], 1);
            let mag: Vec<C> = s.u[c].iter().zip(&du).map(|(v, dv)| C::from((1.0 + m2) * v.norm_sqr() + dv.norm_sqr())).collect();
            u2 += cheb.integrate(&mag).re;
            let fm: Vec<C> = d.f[c].iter().map(|v| C::from(v.norm_sqr())).collect();
            f2 += cheb.integrate(&fm).re;
        }
        eta2 += (1.0 + m2).powi(2) * s.eta.norm_sqr();
        keta2 += omega * omega * (1.0 + m2) * s.eta.norm_sqr();
        h2 += d.h.norm_sqr();
    }
    let rhs = f2.sqrt() + h2.sqrt();
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok((u2.sqrt() + eta2.sqrt() + keta2.sqrt()) / rhs)
}
