use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::spectral::{Chebyshev, ModeIndex, PlateField, SpectralField, TorusGrid};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Physical symbols of one lattice point.
#[derive(Debug, Clone, Copy)]
pub struct ModeParams {
    pub mode: ModeIndex,
    pub omega: f64,
    pub xi: [f64; 2],
    pub m2: f64,
    pub mu_f: f64,
    pub mu_s: f64,
}

impl ModeParams {
    pub fn new(grid: &TorusGrid, cfg: &SolverConfig, mode: ModeIndex) -> Self {
        Self {
            mode,
            omega: grid.omega(mode.k),
            xi: grid.wavevector(mode.xi),
            m2: grid.wavenumber_sq(mode.xi),
            mu_f: cfg.mu_f,
            mu_s: cfg.mu_s,
        }
    }

    /// `i omega + mu_f |xi|^2`, the zeroth-order coefficient of the momentum rows.
    pub fn sigma(&self) -> C {
        C::new(self.mu_f * self.m2, self.omega)
    }

    pub fn plate_symbol(&self) -> C {
        C::new(self.m2 * self.m2 - self.omega * self.omega, self.omega * self.mu_s * self.m2)
    }
}

/// `|xi|^4 - k^2 + i k mu_s |xi|^2` in physical units.
pub fn plate_symbol_damped(grid: &TorusGrid, mode: ModeIndex, mu_s: f64) -> C {
    let (w, m2) = (grid.omega(mode.k), grid.wavenumber_sq(mode.xi));
    C::new(m2 * m2 - w * w, w * mu_s * m2)
}

/// Right-hand side of one mode problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeData {
    pub f: [Vec<C>; 3],
    pub g: Vec<C>,
    pub h: C,
}

impl ModeData {
    pub fn zeros(nodes: usize) -> Self {
        Self { f: [vec![ZERO; nodes], vec![ZERO; nodes], vec![ZERO; nodes]], g: vec![ZERO; nodes], h: ZERO }
    }

    /// Extracts the data of mode `m` from full fields; a missing `g` means zero.
    pub fn from_fields(m: ModeIndex, f: &SpectralField, g: Option<&SpectralField>, h: &PlateField) -> Self {
        let n = f.grid().n_nodes();
        Self {
            f: [f.profile(m, 0), f.profile(m, 1), f.profile(m, 2)],
            g: g.map_or_else(|| vec![ZERO; n], |g| g.profile(m, 0)),
            h: h.get(m),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.h == ZERO && self.g.iter().chain(self.f.iter().flatten()).all(|v| *v == ZERO)
    }
}

/// Unknowns of one mode: velocity and pressure profiles and the plate amplitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSolution {
    pub mode: ModeIndex,
    pub u: [Vec<C>; 3],
    pub p: Vec<C>,
    pub eta: C,
}

impl ModeSolution {
    pub fn zeros(mode: ModeIndex, nodes: usize) -> Self {
        Self { mode, u: [vec![ZERO; nodes], vec![ZERO; nodes], vec![ZERO; nodes]], p: vec![ZERO; nodes], eta: ZERO }
    }

    pub fn from_fields(m: ModeIndex, u: &SpectralField, p: &SpectralField, eta: &PlateField) -> Self {
        Self { mode: m, u: [u.profile(m, 0), u.profile(m, 1), u.profile(m, 2)], p: p.profile(m, 0), eta: eta.get(m) }
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().flatten().chain(&self.p).fold(self.eta.norm(), |a, v| a.max(v.norm()))
    }
}

/// Largest pointwise residual of each equation group of a mode problem.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ModeResiduals {
    /// Momentum at interior nodes.
    pub momentum: f64,
    /// Continuity at every node.
    pub continuity: f64,
    /// Velocity boundary conditions at both faces.
    pub boundary: f64,
    /// Plate equation.
    pub plate: f64,
}

impl ModeResiduals {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.continuity).max(self.boundary).max(self.plate)
    }

    pub fn merge(&self, o: &ModeResiduals) -> ModeResiduals {
        ModeResiduals {
            momentum: self.momentum.max(o.momentum),
            continuity: self.continuity.max(o.continuity),
            boundary: self.boundary.max(o.boundary),
            plate: self.plate.max(o.plate),
        }
    }
}

fn apply(m: &DMatrix<f64>, v: &[C]) -> Vec<C> {
    (0..m.nrows()).map(|i| v.iter().enumerate().map(|(j, x)| x * m[(i, j)]).sum()).collect()
}

/// Residuals of the strong-form mode equations for a candidate solution.
pub fn mode_residuals(cheb: &Chebyshev, par: &ModeParams, sol: &ModeSolution, data: &ModeData) -> ModeResiduals {
    let n = cheb.len();
    let (d1, d2) = (cheb.d1(), cheb.d2());
    let sigma = par.sigma();
    let du: Vec<Vec<C>> = sol.u.iter().map(|u| apply(d1, u)).collect();
    let ddu: Vec<Vec<C>> = sol.u.iter().map(|u| apply(d2, u)).collect();
    let dp = apply(d1, &sol.p);
    let mut r = ModeResiduals::default();
    for j in 1..n - 1 {
        for c in 0..3 {
            let grad_p = if c < 2 { I * par.xi[c] * sol.p[j] } else { dp[j] };
            let res = sigma * sol.u[c][j] - par.mu_f * ddu[c][j] + grad_p - data.f[c][j];
            r.momentum = r.momentum.max(res.norm());
        }
    }
    for j in 0..n {
        let div = I * par.xi[0] * sol.u[0][j] + I * par.xi[1] * sol.u[1][j] + du[2][j];
        r.continuity = r.continuity.max((div - data.g[j]).norm());
    }
    let bottom = [sol.u[0][0], sol.u[1][0], sol.u[2][0] + I * par.omega * sol.eta];
    let top = [sol.u[0][n - 1], sol.u[1][n - 1], sol.u[2][n - 1]];
    r.boundary = bottom.iter().chain(&top).fold(0.0, |a, v| a.max(v.norm()));
    r.plate = if par.m2 == 0.0 {
        let traction = data.h + sol.p[0] - 2.0 * par.mu_f * du[2][0];
        traction.norm().max(sol.eta.norm())
    } else {
        (par.plate_symbol() * sol.eta - sol.p[0] + 2.0 * par.mu_f * du[2][0] - data.h).norm()
    };
    r
}

enum Factor {
    /// One dense system for velocity, pressure and plate amplitude.
    Coupled(LU<C, Dyn, Dyn>),
    /// Lateral mean: decoupled tangential problems and vertical integration.
    LateralMean { tangential: LU<C, Dyn, Dyn>, pressure: LU<C, Dyn, Dyn> },
}

/// Factorised operator of one mode problem, reusable across right-hand sides.
pub struct ModeOperator {
    params: ModeParams,
    cheb: Chebyshev,
    factor: Factor,
}

impl ModeOperator {
    pub fn new(grid: &TorusGrid, cfg: &SolverConfig, mode: ModeIndex) -> Result<Self> {
        let params = ModeParams::new(grid, cfg, mode);
        let cheb = grid.cheb().clone();
        let factor = if mode.is_lateral_mean() {
            Self::lateral_factor(&cheb, &params)
        } else {
            Self::coupled_factor(&cheb, &params)
        };
        let op = Self { params, cheb, factor };
        if !op.is_invertible() {
            return Err(Error::Singular { k: mode.k, xi: mode.xi });
        }
        Ok(op)
    }

    fn is_invertible(&self) -> bool {
        match &self.factor {
            Factor::Coupled(lu) => lu.is_invertible(),
            Factor::LateralMean { tangential, pressure } => tangential.is_invertible() && pressure.is_invertible(),
        }
    }

    pub fn params(&self) -> &ModeParams {
        &self.params
    }

    fn coupled_factor(cheb: &Chebyshev, par: &ModeParams) -> Factor {
        let n = cheb.len();
        let size = 4 * n + 1;
        let (d1, d2) = (cheb.d1(), cheb.d2());
        let sigma = par.sigma();
        let mu = par.mu_f;
        let mut a = DMatrix::<C>::zeros(size, size);
        let p0 = 3 * n;
        let eta = 4 * n;
        for c in 0..3 {
            let row0 = c * n;
            // bottom face
            a[(row0, row0)] = C::from(1.0);
            if c == 2 {
                a[(row0, eta)] = I * par.omega;
            }
            // lid
            a[(row0 + n - 1, row0 + n - 1)] = C::from(1.0);
            for i in 1..n - 1 {
                let r = row0 + i;
                for j in 0..n {
                    a[(r, row0 + j)] = C::from(-mu * d2[(i, j)]);
                }
                a[(r, row0 + i)] += sigma;
                if c < 2 {
                    a[(r, p0 + i)] = I * par.xi[c];
                } else {
                    for j in 0..n {
                        a[(r, p0 + j)] = C::from(d1[(i, j)]);
                    }
                }
            }
        }
        for i in 0..n {
            let r = p0 + i;
            a[(r, i)] = I * par.xi[0];
            a[(r, n + i)] = I * par.xi[1];
            for j in 0..n {
                a[(r, 2 * n + j)] += C::from(d1[(i, j)]);
            }
        }
        a[(eta, eta)] = par.plate_symbol();
        a[(eta, p0)] = C::from(-1.0);
        for j in 0..n {
            a[(eta, 2 * n + j)] = C::from(2.0 * mu * d1[(0, j)]);
        }
        Factor::Coupled(a.lu())
    }

    fn lateral_factor(cheb: &Chebyshev, par: &ModeParams) -> Factor {
        let n = cheb.len();
        let (d1, d2) = (cheb.d1(), cheb.d2());
        let mut t = DMatrix::<C>::zeros(n, n);
        t[(0, 0)] = C::from(1.0);
        t[(n - 1, n - 1)] = C::from(1.0);
        for i in 1..n - 1 {
            for j in 0..n {
                t[(i, j)] = C::from(-par.mu_f * d2[(i, j)]);
            }
            t[(i, i)] += par.sigma();
        }
        let mut p = DMatrix::<C>::zeros(n, n);
        p[(0, 0)] = C::from(1.0);
        for i in 1..n {
            for j in 0..n {
                p[(i, j)] = C::from(d1[(i, j)]);
            }
        }
        Factor::LateralMean { tangential: t.lu(), pressure: p.lu() }
    }

    pub fn solve(&self, data: &ModeData, tol: f64) -> Result<ModeSolution> {
        let n = self.cheb.len();
        let mode = self.params.mode;
        let mut sol = ModeSolution::zeros(mode, n);
        match &self.factor {
            Factor::Coupled(lu) => {
                let mut b = DVector::<C>::zeros(4 * n + 1);
                for c in 0..3 {
                    for i in 1..n - 1 {
                        b[c * n + i] = data.f[c][i];
                    }
                }
                for i in 0..n {
                    b[3 * n + i] = data.g[i];
                }
                b[4 * n] = data.h;
                let x = lu.solve(&b).ok_or(Error::Singular { k: mode.k, xi: mode.xi })?;
                for c in 0..3 {
                    sol.u[c] = x.rows(c * n, n).iter().copied().collect();
                }
                sol.p = x.rows(3 * n, n).iter().copied().collect();
                sol.eta = x[4 * n];
            }
            Factor::LateralMean { tangential, pressure } => {
                let mean = self.cheb.integrate(&data.g);
                if mean.norm() > tol {
                    return Err(Error::Incompatible { k: mode.k, mean: mean.norm() });
                }
                for c in 0..2 {
                    let mut b = DVector::<C>::zeros(n);
                    for i in 1..n - 1 {
                        b[i] = data.f[c][i];
                    }
                    let x = tangential.solve(&b).ok_or(Error::Singular { k: mode.k, xi: mode.xi })?;
                    sol.u[c] = x.iter().copied().collect();
                }
                sol.u[2] = vertical_integral(&self.cheb, &data.g, mean);
                let du3 = apply(self.cheb.d1(), &sol.u[2]);
                let ddu3 = apply(self.cheb.d2(), &sol.u[2]);
                let mut b = DVector::<C>::zeros(n);
                b[0] = 2.0 * self.params.mu_f * du3[0] - data.h;
                for i in 1..n {
                    b[i] = data.f[2][i] - self.params.sigma() * sol.u[2][i] + self.params.mu_f * ddu3[i];
                }
                let x = pressure.solve(&b).ok_or(Error::Singular { k: mode.k, xi: mode.xi })?;
                sol.p = x.iter().copied().collect();
            }
        }
        Ok(sol)
    }

    pub fn residuals(&self, sol: &ModeSolution, data: &ModeData) -> ModeResiduals {
        mode_residuals(&self.cheb, &self.params, sol, data)
    }
}

/// `int_0^x g` at the nodes, with the (tolerated) mean spread linearly so that
/// both face values vanish exactly.
pub fn vertical_integral(cheb: &Chebyshev, g: &[C], mean: C) -> Vec<C> {
    let mut out = apply(cheb.cumulative_integral(), g);
    for (v, x) in out.iter_mut().zip(cheb.nodes()) {
        *v -= mean * *x;
    }
    out[0] = ZERO;
    *out.last_mut().expect("nonempty profile") = ZERO;
    out
}

fn mean_tolerance(cfg: &SolverConfig, g: &[C]) -> f64 {
    cfg.tol_eq * g.iter().fold(1.0f64, |a, v| a.max(v.norm()))
}

/// Solves the time-harmonic problem of a mode with `k != 0`.
pub fn solve_oscillatory_mode(grid: &TorusGrid, cfg: &SolverConfig, mode: ModeIndex, data: &ModeData) -> Result<ModeSolution> {
    if mode.k == 0 {
        return Err(Error::WrongEntryPoint);
    }
    solve_mode(grid, cfg, mode, data)
}

/// Solves the steady problem of lateral mode `xi`.
pub fn solve_steady_mode(grid: &TorusGrid, cfg: &SolverConfig, xi: [i64; 2], data: &ModeData) -> Result<ModeSolution> {
    solve_mode(grid, cfg, ModeIndex::new(0, xi), data)
}

/// Dispatches on the mode; both the steady and the oscillatory problem share
/// one discretisation that reduces correctly at `k = 0`.
pub fn solve_mode(grid: &TorusGrid, cfg: &SolverConfig, mode: ModeIndex, data: &ModeData) -> Result<ModeSolution> {
    let n = grid.n_nodes();
    if data.g.len() != n || data.f.iter().any(|f| f.len() != n) {
        return Err(Error::Shape(format!("mode data must have {n} nodal values")));
    }
    if data.is_zero() {
        return Ok(ModeSolution::zeros(mode, n));
    }
    ModeOperator::new(grid, cfg, mode)?.solve(data, mean_tolerance(cfg, &data.g))
}

/// Assembles full fields from one solution per retained mode.
pub fn synthesize(grid: &TorusGrid, solutions: &[ModeSolution]) -> Result<(SpectralField, SpectralField, PlateField)> {
    let mut u = SpectralField::zeros(grid, 3);
    let mut p = SpectralField::zeros(grid, 1);
    let mut eta = PlateField::zeros(grid);
    let mut seen = vec![false; grid.n_t() * grid.n_x() * grid.n_x()];
    let nx = grid.n_x();
    for s in solutions {
        let (Some(a), Some(b), Some(c)) = (grid.k_index(s.mode.k), grid.xi_index(s.mode.xi[0]), grid.xi_index(s.mode.xi[1]))
        else {
            continue;
        };
        seen[(a * nx + b) * nx + c] = true;
        for comp in 0..3 {
            u.set_profile(s.mode, comp, &s.u[comp]);
        }
        p.set_profile(s.mode, 0, &s.p);
        eta.set(s.mode, s.eta);
    }
    if let Some(pos) = seen.iter().position(|v| !v) {
        let m = grid.modes()[pos];
        return Err(Error::IncompleteModes { k: m.k, xi: m.xi });
    }
    let real = u.conjugate_symmetry_defect() < 1e-12
        && p.conjugate_symmetry_defect() < 1e-12
        && eta.conjugate_symmetry_defect() < 1e-12;
    u.set_real(real);
    p.set_real(real);
    eta.set_real(real);
    Ok((u, p, eta))
}

/// Solves every retained mode of `(f, g, h)` directly, feeding `g` into each
/// mode problem. Results are ordered like `grid.modes()`.
pub fn solve_modes(
    cfg: &SolverConfig,
    f: &SpectralField,
    g: Option<&SpectralField>,
    h: &PlateField,
) -> Result<Vec<ModeSolution>> {
    let grid = f.grid();
    grid.modes()
        .into_par_iter()
        .map(|m| solve_mode(grid, cfg, m, &ModeData::from_fields(m, f, g, h)))
        .collect()
}

/// Direct solve of the linear problem without lifting the divergence.
pub fn solve_direct(
    cfg: &SolverConfig,
    f: &SpectralField,
    g: Option<&SpectralField>,
    h: &PlateField,
) -> Result<(SpectralField, SpectralField, PlateField)> {
    synthesize(f.grid(), &solve_modes(cfg, f, g, h)?)
}

/// Factorisations of every retained mode, for repeated solves on one grid.
pub struct ModeSolver {
    grid: TorusGrid,
    cfg: SolverConfig,
    ops: Vec<ModeOperator>,
}

impl ModeSolver {
    pub fn new(grid: &TorusGrid, cfg: &SolverConfig) -> Result<Self> {
        let ops = grid.modes().into_par_iter().map(|m| ModeOperator::new(grid, cfg, m)).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: grid.clone(), cfg: cfg.clone(), ops })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn solve(&self, f: &SpectralField, g: Option<&SpectralField>, h: &PlateField) -> Result<Vec<ModeSolution>> {
        self.ops
            .par_iter()
            .map(|op| {
                let data = ModeData::from_fields(op.params.mode, f, g, h);
                if data.is_zero() {
                    return Ok(ModeSolution::zeros(op.params.mode, self.grid.n_nodes()));
                }
                op.solve(&data, mean_tolerance(&self.cfg, &data.g))
            })
            .collect()
    }

    pub fn solve_fields(
        &self,
        f: &SpectralField,
        g: Option<&SpectralField>,
        h: &PlateField,
    ) -> Result<(SpectralField, SpectralField, PlateField)> {
        synthesize(&self.grid, &self.solve(f, g, h)?)
    }
}

/// Worst residuals over all modes of a full linear solution.
pub fn linear_residuals(
    cfg: &SolverConfig,
    u: &SpectralField,
    p: &SpectralField,
    eta: &PlateField,
    f: &SpectralField,
    g: Option<&SpectralField>,
    h: &PlateField,
) -> ModeResiduals {
    let grid = u.grid();
    grid.modes()
        .into_par_iter()
        .map(|m| {
            let par = ModeParams::new(grid, cfg, m);
            mode_residuals(grid.cheb(), &par, &ModeSolution::from_fields(m, u, p, eta), &ModeData::from_fields(m, f, g, h))
        })
        .reduce(ModeResiduals::default, |a, b| a.merge(&b))
}
