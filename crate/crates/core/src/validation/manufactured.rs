use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::jet::Jet;
use crate::config::SolverConfig;
use crate::error::Result;
use crate::spectral::{x_norm, y_norm, ModeIndex, PlateField, SpectralField, TorusGrid};

type C = Complex64;
const I: C = C::new(0.0, 1.0);

/// Controls the content of a manufactured solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedKnobs {
    /// Largest `|k|` carrying data.
    pub k_band: i64,
    /// Largest `|xi_i|` carrying data.
    pub xi_band: i64,
    /// Build a solenoidal velocity so that `g = 0`.
    pub solenoidal: bool,
    /// Keep the plate flat (`eta = 0`).
    pub flat_plate: bool,
    /// Overall amplitude of the solution.
    pub amplitude: f64,
}

impl Default for ManufacturedKnobs {
    fn default() -> Self {
        Self { k_band: 2, xi_band: 2, solenoidal: false, flat_plate: false, amplitude: 1.0 }
    }
}

/// Closed-form solution of the linear problem with data obtained by applying
/// the operators exactly. All kinematic constraints hold by construction.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub seed: u64,
    pub knobs: ManufacturedKnobs,
    pub u: SpectralField,
    pub p: SpectralField,
    pub eta: PlateField,
    pub f: SpectralField,
    pub g: SpectralField,
    pub h: PlateField,
    pub solution_norm: f64,
    pub data_norm: f64,
}

/// Profile vanishing at both faces: `sin(pi x) e^{x/2}`.
fn bubble(x: f64) -> Jet {
    Jet::sin(PI, x) * Jet::exp(0.5, x)
}

/// Profile with value one and zero slope at the plate, clamped at the lid:
/// `(1 - x)^2 (1 + 2x) cos x`.
fn blend(x: f64) -> Jet {
    let y = Jet::constant(1.0) - Jet::var(x);
    y * y * (Jet::constant(1.0) + 2.0 * Jet::var(x)) * Jet::cos(1.0, x)
}

/// Clamped at both faces: `x^2 (1 - x)^2 e^x`.
fn clamped(x: f64) -> Jet {
    let y = Jet::constant(1.0) - Jet::var(x);
    Jet::var(x) * Jet::var(x) * y * y * Jet::exp(1.0, x)
}

fn pressure_shape(x: f64, c: [C; 2]) -> [C; 2] {
    let j = Jet::cos(1.0, x);
    [c[0] * j.d(0) + c[1] * x, c[0] * j.d(1) + c[1]]
}

struct ModeProfiles {
    /// Velocity components: value, first and second derivative.
    u: [[C; 3]; 3],
    p: [C; 2],
}

fn jet_c(j: Jet, a: C) -> [C; 4] {
    [a * j.d(0), a * j.d(1), a * j.d(2), a * j.d(3)]
}

fn mode_profiles(
    x: f64,
    omega: f64,
    xi: [f64; 2],
    eta: C,
    amps: &[C; 5],
    solenoidal: bool,
) -> ModeProfiles {
    let m = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let mut u = [[C::new(0.0, 0.0); 3]; 3];
    if solenoidal && m > 0.0 {
        // vertical component psi, along-xi component i psi'/|xi|, across-xi bubble
        let psi = jet_c(blend(x), -I * omega * eta);
        let extra = jet_c(clamped(x), amps[0]);
        let psi: Vec<C> = psi.iter().zip(&extra).map(|(a, b)| a + b).collect();
        let across = jet_c(bubble(x), amps[1]);
        let (e, ep) = ([xi[0] / m, xi[1] / m], [-xi[1] / m, xi[0] / m]);
        for c in 0..2 {
            for d in 0..3 {
                u[c][d] = I * psi[d + 1] / m * e[c] + across[d] * ep[c];
            }
        }
        u[2].copy_from_slice(&psi[..3]);
    } else if solenoidal {
        for c in 0..2 {
            let b = jet_c(bubble(x), amps[c]);
            u[c] = [b[0], b[1], b[2]];
        }
    } else {
        for c in 0..2 {
            let b = jet_c(bubble(x), amps[c]);
            u[c] = [b[0], b[1], b[2]];
        }
        let bl = jet_c(blend(x), -I * omega * eta);
        let b = jet_c(bubble(x), amps[2]);
        for d in 0..3 {
            u[2][d] = bl[d] + b[d];
        }
    }
    ModeProfiles { u, p: pressure_shape(x, [amps[3], amps[4]]) }
}

/// Builds a manufactured case on `cfg`'s grid. Randomness is fully determined
/// by `seed`.
pub fn make_manufactured(cfg: &SolverConfig, seed: u64, knobs: ManufacturedKnobs) -> Result<ManufacturedCase> {
    let grid: TorusGrid = cfg.grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut crand = |scale: f64| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
    let mut u = SpectralField::zeros(&grid, 3);
    let mut p = SpectralField::zeros(&grid, 1);
    let mut eta = PlateField::zeros(&grid);
    let mut f = SpectralField::zeros(&grid, 3);
    let mut g = SpectralField::zeros(&grid, 1);
    let mut h = PlateField::zeros(&grid);
    let nodes = grid.nodes().to_vec();
    for mode in grid.modes() {
        if mode.k.abs() > knobs.k_band || mode.xi[0].abs() > knobs.xi_band || mode.xi[1].abs() > knobs.xi_band {
            continue;
        }
        let decay = knobs.amplitude / (1.0 + (mode.k.pow(2) + mode.xi[0].pow(2) + mode.xi[1].pow(2)) as f64);
        let amps = [crand(decay), crand(decay), crand(decay), crand(decay), crand(decay)];
        let e = if mode.is_lateral_mean() || knobs.flat_plate { C::new(0.0, 0.0) } else { crand(decay) };
        fill_mode(cfg, &grid, mode, e, &amps, knobs.solenoidal, &nodes, [&mut u, &mut p, &mut f, &mut g]);
        eta.set(mode, e);
        h.set(mode, plate_data(cfg, &grid, mode, e, &amps, knobs.solenoidal));
    }
    for field in [&mut u, &mut p, &mut f, &mut g] {
        field.symmetrize();
    }
    eta.symmetrize();
    h.symmetrize();
    let solution_norm = x_norm(&u, &p, &eta, 2.0)?;
    let data_norm = y_norm(&f, &g, &h, 2.0)?;
    Ok(ManufacturedCase { seed, knobs, u, p, eta, f, g, h, solution_norm, data_norm })
}

#[allow(clippy::too_many_arguments)]
fn fill_mode(
    cfg: &SolverConfig,
    grid: &TorusGrid,
    mode: ModeIndex,
    eta: C,
    amps: &[C; 5],
    solenoidal: bool,
    nodes: &[f64],
    out: [&mut SpectralField; 4],
) {
    let [u, p, f, g] = out;
    let omega = grid.omega(mode.k);
    let xi = grid.wavevector(mode.xi);
    let sigma = C::new(cfg.mu_f * grid.wavenumber_sq(mode.xi), omega);
    for (j, &x) in nodes.iter().enumerate() {
        let pr = mode_profiles(x, omega, xi, eta, amps, solenoidal);
        for c in 0..3 {
            u.set(mode, j, c, pr.u[c][0]);
            let grad_p = if c < 2 { I * xi[c] * pr.p[0] } else { pr.p[1] };
            f.set(mode, j, c, sigma * pr.u[c][0] - cfg.mu_f * pr.u[c][2] + grad_p);
        }
        p.set(mode, j, 0, pr.p[0]);
        let div = I * xi[0] * pr.u[0][0] + I * xi[1] * pr.u[1][0] + pr.u[2][1];
        g.set(mode, j, 0, if solenoidal { C::new(0.0, 0.0) } else { div });
    }
}

fn plate_data(cfg: &SolverConfig, grid: &TorusGrid, mode: ModeIndex, eta: C, amps: &[C; 5], solenoidal: bool) -> C {
    let omega = grid.omega(mode.k);
    let pr = mode_profiles(0.0, omega, grid.wavevector(mode.xi), eta, amps, solenoidal);
    let traction = pr.p[0] - 2.0 * cfg.mu_f * pr.u[2][1];
    if mode.is_lateral_mean() {
        -traction
    } else {
        let m2 = grid.wavenumber_sq(mode.xi);
        C::new(m2 * m2 - omega * omega, omega * cfg.mu_s * m2) * eta - traction
    }
}

impl ManufacturedCase {
    /// Largest violation of the face conditions and of the plate mean.
    pub fn constraint_defect(&self) -> f64 {
        let grid = self.u.grid();
        let last = grid.n_nodes() - 1;
        let mut d = self.eta.lateral_mean_defect();
        for m in grid.modes() {
            let omega = grid.omega(m.k);
            d = d.max(self.u.get(m, 0, 0).norm()).max(self.u.get(m, 0, 1).norm());
            d = d.max((self.u.get(m, 0, 2) + I * omega * self.eta.get(m)).norm());
            for c in 0..3 {
                d = d.max(self.u.get(m, last, c).norm());
            }
        }
        d
    }
}
