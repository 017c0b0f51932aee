mod common;

use num_complex::Complex64;
use plateflow::nonlinear::*;
use plateflow::spectral::*;
use plateflow::validation::{evaluate, make_manufactured, ManufacturedKnobs};
use plateflow::{ModeIndex, PlateField, SolverConfig, SpectralField};

use common::*;

fn cfg() -> SolverConfig {
    SolverConfig::default().with_truncation(5, 5, 16)
}

/// Smooth real fields with the kinematic constraints built in, scaled by `a`.
fn smooth_state(seed: u64, a: f64) -> (SpectralField, SpectralField, PlateField) {
    let case = make_manufactured(&cfg(), seed, ManufacturedKnobs { k_band: 1, xi_band: 1, ..Default::default() }).unwrap();
    (case.u.scaled(a), case.p.scaled(a), case.eta.scaled(a))
}

fn value(f: &SpectralField, t: f64, x: [f64; 3]) -> Vec<f64> {
    evaluate(f, t, [x[0], x[1]], x[2]).iter().map(|v| v.re).collect()
}

/// Point state assembled from spectral derivatives evaluated at `(t, x)`.
fn state_at(u: &SpectralField, p: &SpectralField, eta: &PlateField, t: f64, x: [f64; 3]) -> PointState {
    let xp = [x[0], x[1]];
    let grads = [dx(u, 0), dx(u, 1), dz(u, 1)];
    let seconds = [dz(&grads[0], 1), dz(&grads[1], 1), dz(u, 2)];
    let mut st = PointState {
        x3: x[2],
        eta: plate_value(eta, t, xp),
        eta_t: plate_value(&plate_dt(eta), t, xp),
        eta_x: [plate_value(&plate_dx(eta, 0), t, xp), plate_value(&plate_dx(eta, 1), t, xp)],
        eta_xx: [
            plate_value(&plate_dx(&plate_dx(eta, 0), 0), t, xp),
            plate_value(&plate_dx(&plate_dx(eta, 1), 1), t, xp),
        ],
        p: value(p, t, x)[0],
        dp3: value(&dz(p, 1), t, x)[0],
        ..Default::default()
    };
    let uv = value(u, t, x);
    for k in 0..3 {
        let (g, s2) = (value(&grads[k], t, x), value(&seconds[k], t, x));
        for i in 0..3 {
            st.u[i] = uv[i];
            st.du[i][k] = g[i];
            st.du3[i][k] = s2[i];
        }
    }
    st
}

const H: f64 = 2e-3;
const D1: [(f64, f64); 6] = [(-3.0, -1.0), (-2.0, 9.0), (-1.0, -45.0), (1.0, 45.0), (2.0, -9.0), (3.0, 1.0)];
const D2: [(f64, f64); 7] = [(-3.0, 2.0), (-2.0, -27.0), (-1.0, 270.0), (0.0, -490.0), (1.0, 270.0), (2.0, -27.0), (3.0, 2.0)];

/// Velocity and pressure on the deformed domain, through the inverse map.
struct Eulerian<'a> {
    u: &'a SpectralField,
    p: &'a SpectralField,
    eta: &'a PlateField,
}

impl Eulerian<'_> {
    fn at(&self, t: f64, y: [f64; 3]) -> [f64; 4] {
        let x = deform_inverse(self.eta, t, y).unwrap();
        let v = value(self.u, t, x);
        [v[0], v[1], v[2], value(self.p, t, x)[0]]
    }

    /// Derivative along direction 0 (time) or 1..=3 (space) by centred
    /// differences, of order 1 or 2.
    fn d(&self, t: f64, y: [f64; 3], dir: usize, order: usize) -> [f64; 4] {
        let shift = |s: f64| {
            if dir == 0 {
                self.at(t + s, y)
            } else {
                let mut z = y;
                z[dir - 1] += s;
                self.at(t, z)
            }
        };
        let mut out = [0.0; 4];
        if order == 1 {
            for (o, w) in D1 {
                let v = shift(o * H);
                for c in 0..4 {
                    out[c] += w * v[c] / (60.0 * H);
                }
            }
        } else {
            for (o, w) in D2 {
                let v = shift(o * H);
                for c in 0..4 {
                    out[c] += w * v[c] / (180.0 * H * H);
                }
            }
        }
        out
    }
}

#[test]
fn pulled_back_momentum_matches_eulerian_operator() {
    let (u, p, eta) = smooth_state(1, 0.2);
    let mu = 1.0;
    let lap = &(&dx(&dx(&u, 0), 0) + &dx(&dx(&u, 1), 1)) + &dz(&u, 2);
    let eul = Eulerian { u: &u, p: &p, eta: &eta };
    for (t, x) in [(0.3, [0.5, 1.1, 0.3]), (2.0, [4.0, 0.2, 0.7]), (5.1, [2.5, 3.3, 0.55])] {
        let y = deform_map(&eta, t, x).unwrap();
        let v = eul.at(t, y);
        let dv_dt = eul.d(t, y, 0, 1);
        let grad: Vec<[f64; 4]> = (1..=3).map(|k| eul.d(t, y, k, 1)).collect();
        let second: Vec<[f64; 4]> = (1..=3).map(|k| eul.d(t, y, k, 2)).collect();
        let st = state_at(&u, &p, &eta, t, x);
        let rf = st.momentum(mu);
        let dtu = value(&dt(&u), t, x);
        let lapu = value(&lap, t, x);
        let gp = [value(&dx(&p, 0), t, x)[0], value(&dx(&p, 1), t, x)[0], st.dp3];
        let mut scale: f64 = 0.0;
        for i in 0..3 {
            let conv: f64 = (0..3).map(|k| v[k] * grad[k][i]).sum();
            let lap_y: f64 = (0..3).map(|k| second[k][i]).sum();
            let eulerian = dv_dt[i] - mu * lap_y + conv + grad[i][3];
            let flat = dtu[i] - mu * lapu[i] + gp[i] - rf[i];
            scale = scale.max(eulerian.abs());
            assert!((eulerian - flat).abs() < 1e-7, "component {i}: {eulerian} vs {flat}");
        }
        assert!(scale > 1e-2);
    }
}

#[test]
fn pulled_back_continuity_and_traction_match_eulerian_forms() {
    let (u, p, eta) = smooth_state(2, 0.2);
    let eul = Eulerian { u: &u, p: &p, eta: &eta };
    for (t, x) in [(0.7, [0.4, 2.2, 0.35]), (3.9, [5.0, 1.0, 0.8])] {
        let y = deform_map(&eta, t, x).unwrap();
        let div_y: f64 = (1..=3).map(|k| eul.d(t, y, k, 1)[k - 1]).sum();
        let st = state_at(&u, &p, &eta, t, x);
        let div = st.du[0][0] + st.du[1][1] + st.du[2][2];
        let rd = -st.eta * (st.du[0][0] + st.du[1][1]) - (1.0 - x[2]) * (st.eta_x[0] * st.du[0][2] + st.eta_x[1] * st.du[1][2]);
        assert!(((1.0 + st.eta) * div_y - (div - rd)).abs() < 1e-8);
    }
    // traction on the plate
    for (t, xp) in [(1.3, [0.9, 4.4]), (4.2, [3.0, 0.1])] {
        let x = [xp[0], xp[1], 0.0];
        let y = deform_map(&eta, t, x).unwrap();
        assert!((y[2] + plate_value(&eta, t, xp)).abs() < 1e-15);
        let g: Vec<[f64; 4]> = (1..=3).map(|k| eul.d(t, y, k, 1)).collect();
        let st = state_at(&u, &p, &eta, t, x);
        let nu = st.normal();
        // nu is orthogonal to both tangents of the graph x3 = -eta and points down
        assert!((nu[0] - nu[2] * st.eta_x[0]).abs() < 1e-15 && (nu[1] - nu[2] * st.eta_x[1]).abs() < 1e-15);
        assert!(nu[2] < 0.0);
        let pressure = eul.at(t, y)[3];
        let mut traction = 0.0;
        for j in 0..3 {
            let tj = g[j][2] + g[2][j] - if j == 2 { pressure } else { 0.0 };
            traction += tj * nu[j];
        }
        let flat = 2.0 * st.du[2][2] - st.p;
        assert!((traction + flat - st.plate_forcing(1.0)).abs() < 1e-7, "{traction} {flat}");
    }
}

#[test]
fn grid_divergence_defect_matches_point_formula() {
    // products of modes with |k|, |xi_i| <= 1 are resolved on this grid
    let (u, p, eta) = smooth_state(3, 0.1);
    let terms = compute_nonlinear_terms(1.0, &u, &p, &eta).unwrap();
    for (t, x) in [(0.2, [1.0, 2.0, 0.4]), (3.3, [4.1, 0.3, 0.9])] {
        let st = state_at(&u, &p, &eta, t, x);
        let expect = -st.eta * (st.du[0][0] + st.du[1][1]) - (1.0 - x[2]) * (st.eta_x[0] * st.du[0][2] + st.eta_x[1] * st.du[1][2]);
        assert!((value(&terms.rd_tilde, t, x)[0] - expect).abs() < 1e-12);
    }
    assert!(slab_mean_defect(&terms.rd_tilde) < 1e-13);
}

#[test]
fn deformation_round_trip_and_faces() {
    let grid = cfg().grid().unwrap();
    let zero = PlateField::zeros(&grid);
    assert_eq!(deform_map(&zero, 0.3, [0.1, 0.2, 0.4]).unwrap(), [0.1, 0.2, 0.4]);
    let eta = random_plate(&grid, 5).scaled(0.02);
    let d = Deformation::new(&eta).unwrap();
    let mut r = rng(6);
    use rand::Rng;
    for _ in 0..50 {
        let (t, x) = (r.gen_range(0.0..6.0), [r.gen_range(0.0..6.0), r.gen_range(0.0..6.0), r.gen_range(0.0..1.0)]);
        let back = d.inverse(t, d.map(t, x));
        assert!((0..3).all(|i| (back[i] - x[i]).abs() < 1e-12));
        assert_eq!(d.map(t, [x[0], x[1], 1.0])[2], 1.0);
        let bottom = d.map(t, [x[0], x[1], 0.0])[2];
        assert!((bottom + plate_value(&eta, t, [x[0], x[1]])).abs() < 1e-15);
    }
    let big = PlateField::from_modes(&grid, true, |m| if m == ModeIndex::new(0, [0, 0]) { Complex64::new(1.2, 0.0) } else { Complex64::new(0.0, 0.0) });
    assert!(matches!(Deformation::new(&big), Err(plateflow::Error::DegenerateDeformation(_))));
}

fn constant_plate(v: f64) -> PlateField {
    let grid = cfg().grid().unwrap();
    PlateField::from_modes(&grid, true, |m| if m == ModeIndex::new(0, [0, 0]) { Complex64::new(v, 0.0) } else { Complex64::new(0.0, 0.0) })
}

#[test]
fn geometry_matrix_entries() {
    let grid = cfg().grid().unwrap();
    assert_eq!(e_matrix(&PlateField::zeros(&grid)).unwrap().max_abs(), 0.0);
    let e = e_matrix(&constant_plate(-0.1)).unwrap();
    let mean = ModeIndex::new(0, [0, 0]);
    for j in 0..grid.n_nodes() {
        assert!((e.get(mean, j, 8).re - 0.1 / 0.9).abs() < 1e-15);
        assert!(e.get(mean, j, 6).norm() < 1e-16 && e.get(mean, j, 7).norm() < 1e-16);
    }
    let eta = random_plate(&grid, 8).scaled(0.01);
    let e = e_matrix(&eta).unwrap();
    for c in 0..6 {
        assert_eq!(e.component(c).max_abs(), 0.0);
    }
}

#[test]
fn normal_vectors() {
    let grid = cfg().grid().unwrap();
    let flat = normal_vector(&PlateField::zeros(&grid));
    for v in flat.samples.rows() {
        assert_eq!(v.to_vec(), vec![0.0, 0.0, -1.0]);
    }
    let eta = random_plate(&grid, 9).scaled(0.05);
    let n = normal_vector(&eta);
    for v in n.samples.rows() {
        assert!((v.dot(&v) - 1.0).abs() < 1e-14);
    }
    // eta = eps sin x1: nu = (-eps cos x1, 0, -1) + O(eps^2)
    for eps in [1e-2, 1e-3] {
        let eta = PlateField::from_modes(&grid, true, |m| match (m.k, m.xi) {
            (0, [1, 0]) => Complex64::new(0.0, -eps / 2.0),
            (0, [-1, 0]) => Complex64::new(0.0, eps / 2.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let n = normal_vector(&eta);
        let mx = n.samples.shape()[1];
        for i1 in 0..mx {
            let x1 = 2.0 * std::f64::consts::PI * i1 as f64 / mx as f64;
            let v = |c: usize| n.samples[[0, i1, 0, c]];
            let d = [(v(0) + eps * x1.cos()).abs(), v(1).abs(), (v(2) + 1.0).abs()];
            assert!(d.iter().all(|&e| e < eps * eps), "{d:?}");
        }
    }
}

#[test]
fn nonlinear_terms_vanish_and_reduce_correctly() {
    let c = cfg();
    let grid = c.grid().unwrap();
    let z3 = SpectralField::zeros(&grid, 3);
    let z1 = SpectralField::zeros(&grid, 1);
    let z = PlateField::zeros(&grid);
    let t = compute_nonlinear_terms(1.0, &z3, &z1, &z).unwrap();
    assert_eq!(t.rf_tilde.max_abs() + t.rd_tilde.max_abs() + t.r_eta.max_abs(), 0.0);

    let (u, p, _) = smooth_state(4, 0.3);
    let t = compute_nonlinear_terms(1.0, &u, &p, &z).unwrap();
    assert_eq!(t.rd_vector.max_abs(), 0.0);
    assert_eq!(t.rd_tilde.max_abs(), 0.0);
    assert!(t.s_eta.iter().all(|s| s.max_abs() == 0.0));
    assert_eq!(t.r_eta.max_abs(), 0.0);
    // flat geometry: only the convection survives
    let conv = {
        let mut comps = Vec::new();
        let grads = [dx(&u, 0), dx(&u, 1), dz(&u, 1)];
        let pad = grid.padded();
        let us = to_physical(&u, pad.n_t(), pad.n_x());
        let gs: Vec<_> = grads.iter().map(|g| to_physical(g, pad.n_t(), pad.n_x())).collect();
        let mut out = us.clone();
        for ((it, a, b, j, i), o) in out.indexed_iter_mut() {
            *o = -(0..3).map(|k| us[[it, a, b, j, k]] * gs[k][[it, a, b, j, i]]).sum::<Complex64>();
        }
        comps.push(from_physical(&out, &grid).unwrap());
        comps.pop().unwrap()
    };
    assert!((&t.rf_tilde - &conv).max_abs() < 1e-14);
}

#[test]
fn nonlinear_terms_are_quadratic_at_the_origin() {
    let (u, p, eta) = smooth_state(5, 1.0);
    let size = |a: f64| {
        let t = compute_nonlinear_terms(1.0, &u.scaled(a), &p.scaled(a), &eta.scaled(a)).unwrap();
        [t.rf_tilde.max_abs(), t.rd_tilde.max_abs(), t.r_eta.max_abs()]
    };
    let (a, b) = (size(1e-2), size(1e-3));
    for i in 0..3 {
        let slope = (a[i] / b[i]).log10();
        assert!((slope - 2.0).abs() < 0.05, "term {i}: slope {slope}");
    }
}

#[test]
fn real_inputs_give_real_terms() {
    let (u, p, eta) = smooth_state(6, 0.1);
    let t = compute_nonlinear_terms(1.0, &u, &p, &eta).unwrap();
    assert!(t.rf_tilde.conjugate_symmetry_defect() < 1e-15);
    assert!(t.r_eta.conjugate_symmetry_defect() < 1e-15);
}

#[test]
fn smallness_gate() {
    let grid = cfg().grid().unwrap();
    let r = smallness_check(&PlateField::zeros(&grid), 0.1).unwrap();
    assert!(r.passed && r.margin == 0.1);
    let r = smallness_check(&constant_plate(-0.6), 10.0).unwrap();
    assert!(!r.passed && r.violations.iter().any(|v| v.contains("sup |eta|")));
    let eta = random_plate(&grid, 11);
    let eta = &eta - &PlateField::from_modes(&grid, true, |m| if m.is_lateral_mean() { eta.get(m) } else { Complex64::new(0.0, 0.0) });
    let s = s_norm(&eta, 2.0).unwrap();
    let eta = eta.scaled(0.0999 / s);
    let r = smallness_check(&eta, 0.1).unwrap();
    assert!(r.passed && r.margin > 0.0 && r.sup_inverse <= 2.0, "{r:?}");
}

#[test]
fn bound_ratios_are_bounded_and_homogeneous() {
    let grid = cfg().grid().unwrap();
    let z = nonlinear_bound_ratios(1.0, &SpectralField::zeros(&grid, 3), &SpectralField::zeros(&grid, 1), &PlateField::zeros(&grid), 0.1, 2.0).unwrap();
    assert_eq!((z.momentum, z.continuity, z.plate, z.geometry), (0.0, 0.0, 0.0, 0.0));
    let (u, p, eta) = smooth_state(7, 1.0);
    let at = |a: f64| nonlinear_bound_ratios(1.0, &u.scaled(a), &p.scaled(a), &eta.scaled(a), 0.1, 2.0).unwrap();
    let (a, b) = (at(1e-3), at(1e-4));
    assert!((a.momentum / b.momentum - 1.0).abs() < 0.05, "{a:?} {b:?}");
    assert!((a.continuity / b.continuity - 1.0).abs() < 0.05);
    assert!((a.geometry / b.geometry - 1.0).abs() < 0.05);
    // quadratic left side against a right side with linear terms
    assert!((a.plate / b.plate / 10.0 - 1.0).abs() < 0.05, "{} {}", a.plate, b.plate);
}

fn small_data(eps: f64) -> (Forcing, PlateField, SolverConfig) {
    let c = cfg();
    let case = make_manufactured(&c, 12, ManufacturedKnobs::default()).unwrap();
    let norm = sobolev_norm(&case.f, &NormSpec::slab(0, 0.0, 2.0)).unwrap() + sobolev_norm_plate(&case.h, &NormSpec::plate(0, 0.5, 2.0)).unwrap();
    (Forcing::Reference(case.f.scaled(eps / norm)), case.h.scaled(eps / norm), c)
}

#[test]
fn picard_with_zero_data_stops_at_once() {
    let c = cfg();
    let grid = c.grid().unwrap();
    let sol = picard_solve(&c, &Forcing::Reference(SpectralField::zeros(&grid, 3)), &PlateField::zeros(&grid)).unwrap();
    assert_eq!(sol.trace.steps.len(), 1);
    assert_eq!(sol.u.max_abs() + sol.eta.max_abs(), 0.0);
}

#[test]
fn picard_contracts_and_solves_the_system() {
    let (f, h, c) = small_data(1e-3);
    let sol = picard_solve(&c, &f, &h).unwrap();
    assert!(sol.trace.converged && sol.trace.steps.len() <= 10, "{:?}", sol.trace);
    assert!(sol.trace.max_ratio() < 0.5);
    let res = nonlinear_residual(&c, &sol.u, &sol.p, &sol.eta, &f, &h).unwrap();
    assert!(res.max() < 1e-9, "{res:?}");
    // one more application of the fixed-point map changes nothing
    let (ff, g, hh, _) = fixed_point_data(&c, &f, &h, &sol.u, &sol.p, &sol.eta).unwrap();
    let again = plateflow::linear::solve_linear_full(&c, &ff, &g, &hh).unwrap();
    let diff = x_norm(&(&again.u - &sol.u), &(&again.p - &sol.p), &(&again.eta - &sol.eta), 2.0).unwrap();
    assert!(diff <= 10.0 * c.picard_tol * x_norm(&sol.u, &sol.p, &sol.eta, 2.0).unwrap());
    let json = serde_json::to_string(&sol.trace).unwrap();
    assert!(json.contains("\"ratio\""));
}

#[test]
fn residual_grows_linearly_with_a_perturbation() {
    let (f, h, c) = small_data(1e-3);
    let sol = picard_solve(&c, &f, &h).unwrap();
    let bump = |d: f64| {
        let mut u = sol.u.clone();
        let m = ModeIndex::new(1, [1, 0]);
        let j = 5;
        u.set(m, j, 0, u.get(m, j, 0) + d);
        u.set(m.conj(), j, 0, u.get(m.conj(), j, 0) + d);
        nonlinear_residual(&c, &u, &sol.p, &sol.eta, &f, &h).unwrap().momentum
    };
    let (a, b) = (bump(1e-4), bump(1e-5));
    assert!((a / b - 10.0).abs() < 0.1, "{a} {b}");
}

#[test]
fn picard_rejects_large_data() {
    let (f, h, c) = small_data(5.0);
    assert!(picard_solve(&c, &f, &h).is_err());
}

#[test]
fn eulerian_forcing_is_composed_with_the_deformation() {
    let c = cfg();
    let grid = c.grid().unwrap();
    let f = Forcing::eulerian(|t, y| [1e-3 * (t + y[0]).sin(), 0.0, 1e-3 * y[2] * y[1].cos()]);
    let flat = f.pulled_back(&grid, &PlateField::zeros(&grid)).unwrap();
    let eta = random_plate(&grid, 14).scaled(0.01);
    let moved = f.pulled_back(&grid, &eta).unwrap();
    assert_eq!(flat.component(0).coeffs(), moved.component(0).coeffs());
    assert!((&flat - &moved).max_abs() > 1e-7);
}

#[test]
fn trace_records_shrinking_residuals() {
    let (f, h, c) = small_data(1e-3);
    let sol = picard_solve(&c, &f, &h).unwrap();
    let r: Vec<f64> = sol.trace.steps.iter().map(|s| s.entry_residual).collect();
    assert!(r[0] > 1e-5, "{r:?}");
    assert!(r.windows(2).take(3).all(|w| w[1] < 0.1 * w[0]), "{r:?}");
}
