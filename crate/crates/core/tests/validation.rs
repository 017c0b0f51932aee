mod common;

use num_complex::Complex64;
use plateflow::spectral::*;
use plateflow::validation::*;
use plateflow::{Error, ModeIndex, SolverConfig, SpectralField};

use common::*;

fn cfg(n_z: usize) -> SolverConfig {
    SolverConfig::default().with_truncation(5, 5, n_z)
}

#[test]
fn manufactured_cases_satisfy_constraints() {
    for seed in 0..5 {
        let case = make_manufactured(&cfg(16), seed, ManufacturedKnobs::default()).unwrap();
        assert!(case.constraint_defect() < 1e-13, "seed {seed}: {}", case.constraint_defect());
        assert!(case.g.max_abs() > 1e-3);
        // zero slab mean of g at every time frequency
        let grid = case.g.grid();
        for k in -grid.k_max()..=grid.k_max() {
            let mean = grid.cheb().integrate(&case.g.profile(ModeIndex::new(k, [0, 0]), 0));
            assert!(mean.norm() < 1e-14);
        }
    }
}

#[test]
fn manufactured_generation_is_reproducible() {
    let a = make_manufactured(&cfg(8), 42, ManufacturedKnobs::default()).unwrap();
    let b = make_manufactured(&cfg(8), 42, ManufacturedKnobs::default()).unwrap();
    assert_eq!(a.f.coeffs(), b.f.coeffs());
    assert_eq!(a.h.coeffs(), b.h.coeffs());
}

#[test]
fn solenoidal_flat_case_has_no_divergence_data() {
    let knobs = ManufacturedKnobs { solenoidal: true, flat_plate: true, ..Default::default() };
    let case = make_manufactured(&cfg(16), 9, knobs).unwrap();
    assert_eq!(case.g.max_abs(), 0.0);
    assert_eq!(case.eta.max_abs(), 0.0);
    assert!(divergence(&case.u).max_abs() < 1e-10);
    let report = cross_validate_linear(&cfg(16), &case).unwrap();
    assert!(report.relative_discrepancy < 1e-12, "{report:?}");
}

#[test]
fn solenoidal_case_with_moving_plate() {
    let knobs = ManufacturedKnobs { solenoidal: true, ..Default::default() };
    let case = make_manufactured(&cfg(24), 10, knobs).unwrap();
    assert_eq!(case.g.max_abs(), 0.0);
    assert!(case.eta.max_abs() > 0.0);
    assert!(case.constraint_defect() < 1e-13);
    assert!(divergence(&case.u).max_abs() < 1e-8);
}

#[test]
fn both_paths_agree_and_recover_truth() {
    let c = cfg(32);
    let case = make_manufactured(&c, 21, ManufacturedKnobs::default()).unwrap();
    let r = cross_validate_linear(&c, &case).unwrap();
    assert!(r.relative_discrepancy < 1e-9, "{r:?}");
    assert!(r.lift_error < 1e-8 && r.direct_error < 1e-8, "{r:?}");
}

#[test]
fn truth_error_converges_spectrally() {
    let errs: Vec<f64> = [8, 16]
        .iter()
        .map(|&n| {
            let c = cfg(n);
            let case = make_manufactured(&c, 4, ManufacturedKnobs::default()).unwrap();
            cross_validate_linear(&c, &case).unwrap().direct_error
        })
        .collect();
    assert!(errs[1] < 1e-2 * errs[0], "{errs:?}");
}

#[test]
fn fd_oracle_on_constants_and_single_modes() {
    let grid = cfg(16).grid().unwrap();
    let constant = single_mode(&grid, 1, ModeIndex::new(0, [0, 0]), Complex64::new(2.5, 0.0));
    for dir in 0..4 {
        let d = fd_check(&constant, dir).unwrap();
        // only rounding remains, amplified by the 1/h of the stencil
        assert!(d < 1e-10, "direction {dir}: {d}");
    }
    let wave = single_mode(&grid, 1, ModeIndex::new(1, [1, 0]), Complex64::new(1.0, 0.0));
    for dir in 0..3 {
        assert!(fd_check(&wave, dir).unwrap() < 1e-8);
    }
    let nodes = grid.nodes().to_vec();
    let sine = SpectralField::from_modes(&grid, 1, false, |m, j, _| {
        if m == ModeIndex::new(0, [0, 0]) {
            Complex64::new((std::f64::consts::PI * nodes[j]).sin(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    assert!(fd_check(&sine, 3).unwrap() < 1e-8);
    assert!(fd_check(&sine, 4).is_err());
}

#[test]
fn fd_oracle_on_random_fields() {
    let grid = cfg(12).grid().unwrap();
    let f = random_field(&grid, 2, 77);
    for dir in 0..4 {
        let d = fd_check(&f, dir).unwrap();
        assert!(d < 1e-7 * (1.0 + partial(&f, dir).max_abs()), "direction {dir}: {d}");
    }
}

fn sup_params() -> EmbeddingParams {
    EmbeddingParams { m: 2, m_x: [0; 3], m_t: 0, alpha: 2.0, p: f64::INFINITY, r: f64::INFINITY, q: 2.0 }
}

#[test]
fn embedding_ratio_zero_field_and_rejections() {
    let grid = cfg(8).grid().unwrap();
    let eta = plateflow::PlateField::zeros(&grid);
    assert_eq!(embedding_ratio(EmbeddingTarget::Plate(&eta), &sup_params()).unwrap(), 0.0);
    let bad = EmbeddingParams { alpha: 4.5, ..sup_params() };
    match embedding_ratio(EmbeddingTarget::Plate(&eta), &bad) {
        Err(Error::Parameters(msg)) => assert!(msg.contains("alpha"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let bad_r = EmbeddingParams { alpha: 0.5, ..sup_params() };
    match embedding_ratio(EmbeddingTarget::Plate(&eta), &bad_r) {
        Err(Error::Parameters(msg)) => assert!(msg.contains("r <="), "{msg}"),
        other => panic!("{other:?}"),
    }
    let too_many = EmbeddingParams { m_x: [3, 0, 0], m_t: 1, ..sup_params() };
    assert!(embedding_ratio(EmbeddingTarget::Plate(&eta), &too_many).is_err());
}

#[test]
fn sup_embedding_ratio_is_bounded_under_refinement() {
    let mut worst = [0.0f64; 2];
    for (i, n) in [5, 9].into_iter().enumerate() {
        let grid = SolverConfig::default().with_truncation(n, n, 4).grid().unwrap();
        for seed in 0..10 {
            let eta = random_plate(&grid, seed);
            let r = embedding_ratio(EmbeddingTarget::Plate(&eta), &sup_params()).unwrap();
            assert!(r.is_finite() && r > 0.0);
            worst[i] = worst[i].max(r);
        }
    }
    assert!(worst[0] < 1.0 && worst[1] < 1.0, "{worst:?}");
}

#[test]
fn slab_embedding_ratio_for_low_and_high_modes() {
    let grid = cfg(12).grid().unwrap();
    let params = EmbeddingParams { m: 1, m_x: [1, 0, 0], m_t: 0, alpha: 0.5, p: 3.0, r: 4.0, q: 2.0 };
    let low = single_mode(&grid, 1, ModeIndex::new(1, [1, 0]), Complex64::new(1.0, 0.0));
    let high = single_mode(&grid, 1, ModeIndex::new(2, [2, 2]), Complex64::new(1.0, 0.0));
    let a = embedding_ratio(EmbeddingTarget::Slab(&low), &params).unwrap();
    let b = embedding_ratio(EmbeddingTarget::Slab(&high), &params).unwrap();
    assert!(a > 0.0 && b > 0.0 && a < 1.0 && b < 1.0, "{a} {b}");
}

#[test]
fn suite_report_passes_and_is_reproducible() {
    let c = cfg(16);
    let opts = SuiteOptions { seed: 3, cases: 2 };
    let a = run_suite(&c, opts).unwrap();
    assert!(a.passed, "{a:#?}");
    assert_eq!(a.oracles.len(), 9);
    let b = run_suite(&c, opts).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
