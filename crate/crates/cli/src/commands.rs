use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use plateflow::halfspace::{boundedness_scan, resonance_report, HalfSpace, Undamped};
use plateflow::lift::{lift_divergence, lift_estimate_check};
use plateflow::linear::{a_priori_ratio, solve_linear_full};
use plateflow::nonlinear::{nonlinear_bound_ratios, nonlinear_residual, picard_solve, smallness_check, Forcing};
use plateflow::spectral::{s_norm, write_field, write_plate, x_norm};
use plateflow::validation::{run_suite, SuiteOptions};
use plateflow::{PlateField, SolverConfig, SpectralField};

use crate::error::CliError;
use crate::manifest::Manifest;
use crate::scenario::{load_data, Frame, ScenarioConfig};

const Q: f64 = 2.0;

fn tolerances(cfg: &SolverConfig) -> serde_json::Value {
    json!({
        "equation": cfg.tol_eq,
        "boundary": cfg.tol_bc,
        "picard": cfg.picard_tol,
        "max_iter": cfg.max_iter,
        "eps0": cfg.eps0,
    })
}

fn write_slab(m: &mut Manifest, name: &str, f: &SpectralField) -> Result<(), CliError> {
    let mut w = BufWriter::new(std::fs::File::create(m.path(name))?);
    write_field(&mut w, f)?;
    Ok(())
}

fn write_plate_file(m: &mut Manifest, name: &str, f: &PlateField) -> Result<(), CliError> {
    let mut w = BufWriter::new(std::fs::File::create(m.path(name))?);
    write_plate(&mut w, f)?;
    Ok(())
}

#[derive(Serialize)]
struct ModeRow {
    k: i64,
    xi1: i64,
    xi2: i64,
    eta_abs: f64,
    u_max: f64,
    p_max: f64,
}

/// Per-mode amplitudes of a solution.
fn mode_rows(u: &SpectralField, p: &SpectralField, eta: &PlateField) -> Vec<ModeRow> {
    let grid = u.grid();
    let max = |f: &SpectralField, m| (0..f.components()).flat_map(|c| f.profile(m, c)).fold(0.0f64, |a, v| a.max(v.norm()));
    grid.modes()
        .into_iter()
        .map(|m| ModeRow { k: m.k, xi1: m.xi[0], xi2: m.xi[1], eta_abs: eta.get(m).norm(), u_max: max(u, m), p_max: max(p, m) })
        .collect()
}

fn write_solution(m: &mut Manifest, u: &SpectralField, p: &SpectralField, eta: &PlateField) -> Result<(), CliError> {
    write_slab(m, "u.plf", u)?;
    write_slab(m, "p.plf", p)?;
    write_plate_file(m, "eta.plf", eta)?;
    m.write_csv("modes.csv", mode_rows(u, p, eta))
}

pub fn solve_linear(sc: &ScenarioConfig, out: &Path) -> Result<(), CliError> {
    let cfg = sc.damped_solver()?;
    let mut m = Manifest::new("solve-linear", sc, out)?;
    m.set("tolerances", tolerances(&cfg))?;
    let data = load_data(&sc.forcing, &cfg)?;
    m.set("sampling", json!({ "truncation_defect": data.truncation_defect }))?;
    m.lap("data");
    let sol = solve_linear_full(&cfg, &data.f, &data.g, &data.h)?;
    m.lap("solve");
    let bound = a_priori_ratio(&sol, &data.f, &data.g, &data.h, Q)?;
    m.set("norms", json!({ "q": Q, "solution_x": bound.solution_norm, "data_y": bound.data_norm, "plate_s": s_norm(&sol.eta, Q)? }))?;
    m.set("residuals", sol.residuals)?;
    m.set("constants", json!({ "a_priori_ratio": bound.ratio }))?;
    write_solution(&mut m, &sol.u, &sol.p, &sol.eta)?;
    write_slab(&mut m, "lift.plf", &sol.lift)?;
    m.lap("output");
    m.finish("ok")?;
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    solution_norm: f64,
    increment: f64,
    ratio: Option<f64>,
    plate_norm: f64,
    sup_eta: f64,
    entry_residual: f64,
}

pub fn solve_nonlinear(sc: &ScenarioConfig, out: &Path) -> Result<(), CliError> {
    let cfg = sc.damped_solver()?;
    let mut m = Manifest::new("solve-nonlinear", sc, out)?;
    m.set("tolerances", tolerances(&cfg))?;
    let data = load_data(&sc.forcing, &cfg)?;
    if data.g.max_abs() != 0.0 {
        return Err(CliError::Config("forcing.g must vanish for solve-nonlinear: the velocity is solenoidal".into()));
    }
    m.set("sampling", json!({ "truncation_defect": data.truncation_defect, "frame": sc.forcing.frame }))?;
    let forcing = match (sc.forcing.frame, data.f_exprs) {
        (Frame::Reference, _) => Forcing::Reference(data.f.clone()),
        (Frame::Eulerian, Some(es)) => {
            let a = sc.forcing.amplitude;
            Forcing::eulerian(move |t, y| {
                let p = [t, y[0], y[1], y[2]];
                [a * es[0].eval(p), a * es[1].eval(p), a * es[2].eval(p)]
            })
        }
        (Frame::Eulerian, None) => {
            return Err(CliError::Config("an Eulerian forcing must be given by expressions, not a coefficient file".into()))
        }
    };
    m.lap("data");
    let sol = picard_solve(&cfg, &forcing, &data.h)?;
    m.lap("solve");
    let residual = nonlinear_residual(&cfg, &sol.u, &sol.p, &sol.eta, &forcing, &data.h)?;
    let gate = smallness_check(&sol.eta, cfg.eps0)?;
    let bounds = nonlinear_bound_ratios(cfg.mu_f, &sol.u, &sol.p, &sol.eta, cfg.eps0, Q)?;
    let ratios: Vec<f64> = sol.trace.steps.iter().filter_map(|s| s.ratio).collect();
    m.set(
        "norms",
        json!({ "q": Q, "solution_x": x_norm(&sol.u, &sol.p, &sol.eta, Q)?, "data": sol.trace.data_norm, "ball_radius": sol.trace.radius }),
    )?;
    m.set("residuals", residual)?;
    m.set(
        "constants",
        json!({
            "iterations": sol.trace.steps.len(),
            "converged": sol.trace.converged,
            "contraction_ratios": ratios,
            "max_contraction_ratio": sol.trace.max_ratio(),
            "nonlinear_bound_ratios": bounds,
        }),
    )?;
    m.set("smallness", gate)?;
    m.write_json("trace.json", &sol.trace)?;
    m.write_csv(
        "trace.csv",
        sol.trace.steps.iter().map(|s| TraceRow {
            iteration: s.iteration,
            solution_norm: s.solution_norm,
            increment: s.increment,
            ratio: s.ratio,
            plate_norm: s.plate_norm,
            sup_eta: s.sup_eta,
            entry_residual: s.entry_residual,
        }),
    )?;
    write_solution(&mut m, &sol.u, &sol.p, &sol.eta)?;
    m.lap("output");
    m.finish("ok")?;
    Ok(())
}

/// The half-space symbol is normalised to unit fluid viscosity.
fn halfspace(sc: &ScenarioConfig) -> Result<(SolverConfig, HalfSpace), CliError> {
    let cfg = sc.solver()?;
    if cfg.mu_f != 1.0 {
        return Err(CliError::Config(format!("the plate multiplier is normalised to mu_f = 1, got {}", cfg.mu_f)));
    }
    Ok((cfg.clone(), HalfSpace { period_t: cfg.period_t, period_x: cfg.period_x, mu_s: cfg.mu_s }))
}

#[derive(Serialize)]
struct SampleRow {
    ray: &'static str,
    k: i64,
    xi1: i64,
    xi2: i64,
    abs_multiplier: f64,
    weighted: f64,
}

pub fn multiplier_scan(sc: &ScenarioConfig, out: &Path) -> Result<(), CliError> {
    let (_, hs) = halfspace(sc)?;
    let (k_max, xi_max) = (sc.scan.k_max, sc.scan.xi_max);
    let mut m = Manifest::new("multiplier-scan", sc, out)?;
    let report = boundedness_scan(&hs, k_max, xi_max)?;
    m.lap("scan");
    m.set(
        "constants",
        json!({
            "sup_weighted": report.sup_weighted,
            "argmax": report.argmax,
            "points": report.points,
            "max_undamped_ratio": report.max_undamped_ratio,
            "ratio_argmax": report.ratio_argmax,
            "resonant_points": report.resonant_points,
        }),
    )?;
    m.set("decay", &report.decay)?;
    // plot-ready samples along three rays on a geometric ladder
    let mut rows = Vec::new();
    let mut n = 1i64;
    while n <= k_max.max(xi_max) {
        let xi_n = n.min(xi_max);
        let pts = [("fixed-xi", n.min(k_max), [1, 0]), ("fixed-k", 1, [xi_n, 0]), ("parabolic", (xi_n * xi_n).min(k_max), [xi_n, 0])];
        for (ray, k, xi) in pts {
            rows.push(SampleRow { ray, k, xi1: xi[0], xi2: xi[1], abs_multiplier: hs.multiplier(k, xi).norm(), weighted: hs.weighted_multiplier(k, xi).norm() });
        }
        n *= 2;
    }
    m.write_csv("multiplier_samples.csv", rows)?;
    m.write_csv("decay.csv", report.decay.iter().map(|r| (r.ray.clone(), r.exponent, r.samples)))?;
    m.lap("output");
    m.finish("ok")?;
    Ok(())
}

#[derive(Serialize)]
struct ResonanceRow {
    k: i64,
    xi1: i64,
    xi2: i64,
    multiplier_re: f64,
    multiplier_im: f64,
    abs_multiplier: f64,
    weighted: f64,
    undamped_abs: f64,
    undamped_singular: bool,
    class: String,
    class_fluid_only: String,
    class_internal_only: String,
    class_undamped: String,
}

pub fn resonance(sc: &ScenarioConfig, out: &Path) -> Result<(), CliError> {
    let (_, hs) = halfspace(sc)?;
    let mut m = Manifest::new("resonance-report", sc, out)?;
    let report = resonance_report(&hs, sc.resonance.k_max, sc.resonance.xi_max);
    m.lap("report");
    let rows: Vec<ResonanceRow> = report
        .entries
        .iter()
        .map(|e| ResonanceRow {
            k: e.k,
            xi1: e.xi[0],
            xi2: e.xi[1],
            multiplier_re: e.multiplier.re,
            multiplier_im: e.multiplier.im,
            abs_multiplier: e.multiplier.norm(),
            weighted: e.weighted,
            undamped_abs: e.undamped_abs,
            undamped_singular: matches!(hs.undamped_multiplier(e.k, e.xi), Undamped::Singular),
            class: e.class.to_string(),
            class_fluid_only: e.class_fluid_only.to_string(),
            class_internal_only: e.class_internal_only.to_string(),
            class_undamped: e.class_undamped.to_string(),
        })
        .collect();
    let singular = rows.iter().filter(|r| r.undamped_singular).count();
    m.set("constants", json!({ "entries": rows.len(), "undamped_singular": singular, "counts": report.counts }))?;
    m.write_csv("resonance.csv", rows)?;
    m.lap("output");
    m.finish("ok")?;
    Ok(())
}

pub fn lift_div(sc: &ScenarioConfig, out: &Path) -> Result<(), CliError> {
    let cfg = sc.solver()?;
    let mut m = Manifest::new("lift-div", sc, out)?;
    m.set("tolerances", tolerances(&cfg))?;
    let data = load_data(&sc.forcing, &cfg)?;
    m.set("sampling", json!({ "truncation_defect": data.truncation_defect }))?;
    m.lap("data");
    let lift = lift_divergence(&data.g, cfg.tol_eq)?;
    m.lap("lift");
    let ratios = lift_estimate_check(&data.g, &lift.w, Q)?;
    m.set("residuals", json!({ "divergence": lift.residual_div, "boundary": lift.residual_bc }))?;
    m.set("constants", json!({ "q": Q, "gradient_ratio": ratios.gradient, "negative_norm_ratio": ratios.negative }))?;
    write_slab(&mut m, "w.plf", &lift.w)?;
    m.lap("output");
    m.finish("ok")?;
    Ok(())
}

#[derive(Serialize)]
struct OracleRow<'a> {
    oracle: &'a str,
    passed: bool,
    observed: f64,
    tolerance: f64,
}

pub fn validate(sc: &ScenarioConfig, out: &Path) -> Result<(), CliError> {
    let cfg = sc.damped_solver()?;
    let mut m = Manifest::new("validate", sc, out)?;
    m.set("tolerances", tolerances(&cfg))?;
    let report = run_suite(&cfg, SuiteOptions { seed: sc.validate.seed, cases: sc.validate.cases })?;
    m.lap("suite");
    m.write_json("suite.json", &report)?;
    m.write_csv(
        "suite.csv",
        report.oracles.iter().map(|o| OracleRow { oracle: o.name, passed: o.passed, observed: o.observed, tolerance: o.tolerance }),
    )?;
    let failed: Vec<&str> = report.oracles.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    m.set("constants", json!({ "passed": report.passed, "failed": failed }))?;
    m.lap("output");
    m.finish(if report.passed { "ok" } else { "failed" })?;
    if !report.passed {
        return Err(CliError::Validation(format!("oracles failed: {}", failed.join(", "))));
    }
    Ok(())
}

/// The symbol studies need a non-empty lattice.
pub fn check_lattice(sc: &ScenarioConfig, which: &str) -> Result<(), CliError> {
    let l = if which == "scan" { &sc.scan } else { &sc.resonance };
    if l.k_max < 1 || l.xi_max < 1 {
        return Err(CliError::Config(format!("[{which}] k_max and xi_max must be at least 1")));
    }
    Ok(())
}
