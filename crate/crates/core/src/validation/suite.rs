//! The batch of oracles run by the `validate` subcommand.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cross::{cross_validate_linear, PRESSURE_CONVENTION};
use super::embedding::{embedding_ratio, EmbeddingParams, EmbeddingTarget};
use super::fd::fd_check;
use super::manufactured::{make_manufactured, ManufacturedKnobs};
use crate::config::SolverConfig;
use crate::error::Result;
use crate::halfspace::HalfSpace;
use crate::lift::lift_divergence;
use crate::spectral::partial;

/// One oracle of the suite: the worst observed value against its threshold.
#[derive(Debug, Clone, Serialize)]
pub struct OracleOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub observed: f64,
    pub tolerance: f64,
    /// Per-case values and auxiliary ratios, keyed by a short label.
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub pressure_convention: &'static str,
    pub oracles: Vec<OracleOutcome>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    pub cases: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 0, cases: 4 }
    }
}

fn upper(name: &'static str, tolerance: f64, values: BTreeMap<String, f64>) -> OracleOutcome {
    let observed = values.values().fold(0.0f64, |a, &v| a.max(v));
    OracleOutcome { name, passed: observed.is_finite() && observed < tolerance, observed, tolerance, values }
}

fn keyed(prefix: &str, seeds: &[u64], vals: &[f64]) -> BTreeMap<String, f64> {
    seeds.iter().zip(vals).map(|(s, &v)| (format!("{prefix}{s}"), v)).collect()
}

/// Runs every oracle on `opts.cases` seeded cases at the truncation of `cfg`
/// (the wall-normal degree is fixed by each oracle).
pub fn run_suite(cfg: &SolverConfig, opts: SuiteOptions) -> Result<SuiteReport> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..opts.cases as u64).map(|i| opts.seed.wrapping_add(i)).collect();
    let at = |n_z: usize| cfg.clone().with_truncation(cfg.n_t, cfg.n_x, n_z);
    let knobs = ManufacturedKnobs::default();
    let mut oracles = Vec::new();

    let fine = at(32);
    let cases = seeds.par_iter().map(|&s| make_manufactured(&fine, s, knobs)).collect::<Result<Vec<_>>>()?;
    let defects: Vec<f64> = cases.iter().map(|c| c.constraint_defect()).collect();
    oracles.push(upper("manufactured-constraints", 1e-13, keyed("seed-", &seeds, &defects)));

    let reports = cases.par_iter().map(|c| cross_validate_linear(&fine, c)).collect::<Result<Vec<_>>>()?;
    let paths: Vec<f64> = reports.iter().map(|r| r.relative_discrepancy).collect();
    oracles.push(upper("dual-path-agreement", 1e-9, keyed("seed-", &seeds, &paths)));
    let truth: Vec<f64> = reports.iter().map(|r| r.lift_error.max(r.direct_error)).collect();
    oracles.push(upper("manufactured-truth", 1e-8, keyed("seed-", &seeds, &truth)));

    // error ratio between N_z = 16 and N_z = 8; a drop of two orders passes
    let drops = seeds
        .par_iter()
        .map(|&s| {
            let mut e = [0.0; 2];
            for (i, n) in [8, 16].into_iter().enumerate() {
                let c = at(n);
                e[i] = cross_validate_linear(&c, &make_manufactured(&c, s, knobs)?)?.direct_error;
            }
            Ok(e[1] / e[0])
        })
        .collect::<Result<Vec<_>>>()?;
    oracles.push(upper("spectral-convergence", 1e-2, keyed("seed-", &seeds, &drops)));

    let fd = cases
        .par_iter()
        .map(|c| {
            let mut worst: f64 = 0.0;
            for dir in 0..4 {
                let scale = 1.0 + partial(&c.u, dir).max_abs();
                worst = worst.max(fd_check(&c.u, dir)? / scale);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    oracles.push(upper("finite-difference-derivatives", 1e-7, keyed("seed-", &seeds, &fd)));

    let lifts = cases
        .par_iter()
        .map(|c| lift_divergence(&c.g, cfg.tol_eq).map(|r| (r.residual_div, r.residual_bc)))
        .collect::<Result<Vec<_>>>()?;
    let div: Vec<f64> = lifts.iter().map(|r| r.0).collect();
    let bc: Vec<f64> = lifts.iter().map(|r| r.1).collect();
    oracles.push(upper("lift-divergence", 1e-10, keyed("seed-", &seeds, &div)));
    oracles.push(upper("lift-boundary", 1e-12, keyed("seed-", &seeds, &bc)));

    // sup-norm embedding of the plate: empirical constants on two truncations
    let params = EmbeddingParams { m: 2, m_x: [0; 3], m_t: 0, alpha: 2.0, p: f64::INFINITY, r: f64::INFINITY, q: 2.0 };
    let mut emb = BTreeMap::new();
    let mut worst = [0.0f64; 2];
    for (i, n) in [cfg.n_x, 2 * cfg.n_x + 1].into_iter().enumerate() {
        let c = cfg.clone().with_truncation(n, n, 4);
        for &s in &seeds {
            let eta = make_manufactured(&c, s, knobs)?.eta;
            let r = embedding_ratio(EmbeddingTarget::Plate(&eta), &params)?;
            worst[i] = worst[i].max(r);
            emb.insert(format!("n{n}-seed-{s}"), r);
        }
    }
    let spread = (worst[1] / worst[0] - 1.0).abs();
    emb.insert("refinement-spread".into(), spread);
    oracles.push(OracleOutcome {
        name: "plate-sup-embedding",
        passed: worst.iter().all(|w| w.is_finite()) && spread < 0.5,
        observed: spread,
        tolerance: 0.5,
        values: emb,
    });

    let hs = HalfSpace { period_t: cfg.period_t, period_x: cfg.period_x, mu_s: cfg.mu_s };
    let depth: Vec<f64> = (0..=40).map(|i| 0.1 * i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut hsv = BTreeMap::new();
    for i in 0..(10 * opts.cases.max(1)) {
        let k = rng.gen_range(-50..=50i64);
        let xi = [rng.gen_range(-12..=12i64), rng.gen_range(-12..=12i64)];
        // steady and lateral-mean modes have no half-space profile
        if k == 0 || xi == [0, 0] {
            continue;
        }
        let eta = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r = hs.substitution_residuals(k, xi, eta, &depth)?;
        hsv.insert(format!("draw-{i}"), r.momentum.max(r.divergence).max(r.boundary));
    }
    oracles.push(upper("half-space-substitution", 1e-10, hsv));

    let passed = oracles.iter().all(|o| o.passed);
    Ok(SuiteReport { seed: opts.seed, cases: opts.cases, pressure_convention: PRESSURE_CONVENTION, oracles, passed })
}
