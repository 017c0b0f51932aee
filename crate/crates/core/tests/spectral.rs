mod common;

use approx::assert_abs_diff_eq;
use ndarray::{Array3, Array5};
use num_complex::Complex64;
use plateflow::spectral::*;
use std::f64::consts::PI;

use common::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn constant_samples_map_to_the_zero_mode() {
    let g = TorusGrid::canonical(5, 5, 6).unwrap();
    let samples = Array5::from_elem((5, 5, 5, 7, 1), c(1.0));
    let f = forward_transform(&samples, &g).unwrap();
    for m in g.modes() {
        let expect = if m == ModeIndex::new(0, [0, 0]) { 1.0 } else { 0.0 };
        for j in 0..7 {
            assert_abs_diff_eq!(f.get(m, j, 0).re, expect, epsilon = 1e-14);
            assert_abs_diff_eq!(f.get(m, j, 0).im, 0.0, epsilon = 1e-14);
        }
    }
}

#[test]
fn cosine_in_time_splits_into_two_half_modes() {
    let g = TorusGrid::canonical(5, 3, 4).unwrap();
    let ts = g.sample_times();
    let samples = Array5::from_shape_fn((5, 3, 3, 5, 1), |(it, _, _, _, _)| c(ts[it].cos()));
    let f = forward_transform(&samples, &g).unwrap();
    for m in g.modes() {
        let expect = if m.xi == [0, 0] && m.k.abs() == 1 { 0.5 } else { 0.0 };
        assert_abs_diff_eq!(f.get(m, 2, 0).re, expect, epsilon = 1e-14);
    }
}

#[test]
fn shape_mismatch_is_rejected() {
    let g = TorusGrid::canonical(5, 5, 6).unwrap();
    let bad = Array5::from_elem((5, 5, 5, 6, 1), c(1.0));
    assert!(matches!(forward_transform(&bad, &g), Err(plateflow::Error::Shape(_))));
}

#[test]
fn single_mode_synthesizes_plane_wave() {
    let g = TorusGrid::canonical(5, 5, 4).unwrap();
    let f = single_mode(&g, 1, ModeIndex::new(1, [1, 0]), c(1.0));
    let phys = inverse_transform(&f);
    let (ts, xs) = (g.sample_times(), g.sample_positions());
    for ((it, i1, _, _, _), v) in phys.indexed_iter() {
        let expect = Complex64::from_polar(1.0, ts[it] + xs[i1]);
        assert!((v - expect).norm() < 1e-13);
    }
    let zero = inverse_transform(&SpectralField::zeros(&g, 3));
    assert!(zero.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn round_trip_and_realness() {
    let g = TorusGrid::canonical(7, 5, 8).unwrap();
    for seed in 0..5 {
        let f = random_field(&g, 3, seed);
        let phys = inverse_transform(&f);
        assert!(phys.iter().all(|v| v.im.abs() < 1e-13));
        let back = forward_transform(&phys, &g).unwrap();
        let err = (&back - &f).max_abs();
        assert!(err < 1e-12, "round trip error {err}");
    }
}

#[test]
fn parseval_grid_quadrature_matches_coefficients() {
    let g = TorusGrid::canonical(7, 5, 10).unwrap();
    let f = random_field(&g, 1, 11);
    let spec = NormSpec::slab(0, 0.0, 2.0);
    let coeff = sobolev_norm(&f, &spec).unwrap();
    let phys = inverse_transform(&f);
    let w = g.cheb().weights();
    let mut acc = 0.0;
    for ((_, _, _, j, _), v) in phys.indexed_iter() {
        acc += w[j] * v.norm_sqr();
    }
    let grid_norm = (acc / (7 * 25) as f64).sqrt();
    assert!((coeff - grid_norm).abs() / coeff < 1e-12);
}

#[test]
fn projections_form_a_complementary_pair() {
    let g = TorusGrid::canonical(5, 3, 6).unwrap();
    let f = random_field(&g, 3, 4);
    let (p, q) = (project_steady(&f), project_oscillatory(&f));
    assert_eq!((&(&p + &q) - &f).max_abs(), 0.0);
    assert_eq!(project_steady(&q).max_abs(), 0.0);
    assert_eq!(project_steady(&p), p);
    assert_eq!(project_oscillatory(&q), q);
    assert!(p.conjugate_symmetry_defect() < 1e-15 && q.conjugate_symmetry_defect() < 1e-15);
}

#[test]
fn chebyshev_derivative_orders() {
    let g = TorusGrid::canonical(3, 3, 12).unwrap();
    let x = g.nodes();
    let sq: Vec<_> = x.iter().map(|&v| c(v * v)).collect();
    let d = cheb_derivative(g.cheb(), &sq, 1).unwrap();
    for (dv, &xv) in d.iter().zip(x) {
        assert!((dv - c(2.0 * xv)).norm() < 1e-13);
    }
    assert!(cheb_derivative(g.cheb(), &sq, 3).is_err());
}

#[test]
fn trace_agrees_with_physical_restriction() {
    let g = TorusGrid::canonical(5, 5, 8).unwrap();
    let f = random_field(&g, 3, 9);
    let tr = trace_bottom(&f, 2);
    let phys_tr = plate_inverse(&tr);
    let phys = inverse_transform(&f);
    for ((a, b, c2), v) in phys_tr.indexed_iter() {
        assert!((v - phys[[a, b, c2, 0, 2]]).norm() < 1e-12);
    }
    let lin = SpectralField::from_modes(&g, 1, true, |m, j, _| if m == ModeIndex::new(0, [0, 0]) { c(g.nodes()[j]) } else { c(0.0) });
    assert_eq!(trace_bottom(&lin, 0).max_abs(), 0.0);
}

#[test]
fn unit_mode_has_unit_norm_and_orders_are_checked() {
    let g = TorusGrid::canonical(5, 5, 6).unwrap();
    let eta = PlateField::from_modes(&g, false, |m| if m == ModeIndex::new(1, [1, 0]) { c(1.0) } else { c(0.0) });
    assert_abs_diff_eq!(sobolev_norm_plate(&eta, &NormSpec::plate(0, 0.0, 2.0)).unwrap(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(sobolev_norm_plate(&eta, &NormSpec::plate(0, 0.0, 3.0)).unwrap(), 1.0, epsilon = 1e-12);
    assert!(matches!(
        sobolev_norm_plate(&eta, &NormSpec::plate(0, -1.5, 2.0)),
        Err(plateflow::Error::UnsupportedOrder(_))
    ));
    let zero = SpectralField::zeros(&g, 3);
    for spec in [NormSpec::slab(0, 0.0, 2.0), NormSpec::slab(2, 2.5, 4.0), NormSpec::slab(1, -1.0, 1.5)] {
        assert_eq!(sobolev_norm(&zero, &spec).unwrap(), 0.0);
    }
}

#[test]
fn lq_norm_of_cosine_matches_closed_form() {
    // mean of |cos x|^4 is 3/8
    let g = TorusGrid::canonical(3, 5, 4).unwrap();
    let mut h = PlateField::zeros(&g);
    h.set(ModeIndex::new(0, [1, 0]), c(0.5));
    h.set(ModeIndex::new(0, [-1, 0]), c(0.5));
    let v = sobolev_norm_plate(&h, &NormSpec::plate(0, 0.0, 4.0)).unwrap();
    assert_abs_diff_eq!(v, (3.0f64 / 8.0).powf(0.25), epsilon = 1e-12);
}

#[test]
fn negative_norm_of_lateral_cosine() {
    // Phi = cos x1 solves the Neumann problem, |grad Phi| = |sin x1|.
    let g = TorusGrid::canonical(3, 5, 8).unwrap();
    let mut f = SpectralField::zeros(&g, 1);
    for s in [-1, 1] {
        for j in 0..g.n_nodes() {
            f.set(ModeIndex::new(0, [s, 0]), j, 0, c(0.5));
        }
    }
    let v = negative_norm(&f, 0.3, 2.0).unwrap();
    assert_abs_diff_eq!(v, 0.5f64.sqrt(), epsilon = 1e-12);
    assert_eq!(negative_norm(&SpectralField::zeros(&g, 1), 0.0, 2.0).unwrap(), 0.0);
}

#[test]
fn negative_norm_is_the_dual_norm() {
    // For mean-free g the supremum of |<g, phi>| / |grad phi| is attained at
    // the potential itself, so random test functions never exceed it.
    let g = TorusGrid::canonical(3, 5, 14).unwrap();
    let mut r0 = rng(3);
    let x0 = g.nodes().to_vec();
    let amps: Vec<_> = (0..4).map(|_| crand(&mut r0)).collect();
    let mut data = SpectralField::from_modes(&g, 1, false, |m, j, _| {
        let xv = x0[j];
        let prof = amps[0] * (PI * xv).cos() + amps[1] * (xv * xv) + amps[2] * (2.0 * xv).exp();
        prof * amps[3].powi((m.xi[0] + 2 * m.xi[1]) as i32) * (1.0 + m.xi[0].abs() as f64)
    });
    data = project_steady(&data);
    let nn = negative_norm_time(&data, 0, 2.0).unwrap();
    let x = g.nodes().to_vec();
    let pair = |phi: &SpectralField| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in g.modes() {
            let a = data.profile(m, 0);
            let b = phi.profile(m, 0);
            let prod: Vec<_> = a.iter().zip(&b).map(|(u, v)| u * v.conj()).collect();
            acc += g.cheb().integrate(&prod);
        }
        acc.norm()
    };
    let grad_norm = |phi: &SpectralField| sobolev_norm(&gradient(phi), &NormSpec::slab(0, 0.0, 2.0)).unwrap();
    let phi_star = dual_potential(&data).unwrap();
    assert!((pair(&phi_star) / grad_norm(&phi_star) - nn).abs() < 1e-9 * nn);
    for seed in 0..20 {
        let mut r = rng(seed + 100);
        let a = [crand(&mut r), crand(&mut r), crand(&mut r)];
        let test = SpectralField::from_modes(&g, 1, false, |m, j, _| {
            if m.k == 0 && m.xi[0].abs() <= 1 && m.xi[1].abs() <= 1 {
                a[(m.xi[0] + 1) as usize % 3] * (x[j] * PI).cos() + a[2] * x[j] * (m.xi[1] as f64)
            } else {
                c(0.0)
            }
        });
        let gn = grad_norm(&test);
        if gn > 1e-12 {
            assert!(pair(&test) / gn <= nn * (1.0 + 1e-10));
        }
    }
}

#[test]
fn constant_data_has_zero_dual_norm() {
    let g = TorusGrid::canonical(3, 3, 8).unwrap();
    let f = SpectralField::from_modes(&g, 1, true, |m, _, _| if m == ModeIndex::new(0, [0, 0]) { c(2.0) } else { c(0.0) });
    assert!(negative_norm(&f, 0.0, 2.0).unwrap() < 1e-13);
}

#[test]
fn binary_container_round_trip() {
    let g = TorusGrid::canonical(5, 3, 6).unwrap();
    let f = random_field(&g, 3, 21);
    let mut buf = Vec::new();
    write_field(&mut buf, &f).unwrap();
    assert_eq!(&buf[..8], b"PLFSPEC1");
    assert_eq!(buf.len(), 8 + 20 + 16 * 5 * 9 * 7 * 3);
    let back = read_field(&mut buf.as_slice(), g.period_t(), g.period_x()).unwrap();
    assert_eq!(back, f);

    let h = random_plate(&g, 5);
    let mut pb = Vec::new();
    write_plate(&mut pb, &h).unwrap();
    assert_eq!(read_plate(&mut pb.as_slice(), &g).unwrap(), h);
    assert!(read_field(&mut &b"NOTMAGIC"[..], 1.0, 1.0).is_err());

    let json = write_field_json(&f).unwrap();
    assert_eq!(read_field_json(&json).unwrap(), f);
}

#[test]
fn plate_transform_round_trip() {
    let g = TorusGrid::canonical(5, 7, 4).unwrap();
    let h = random_plate(&g, 8);
    let back = plate_forward(&plate_inverse(&h), &g).unwrap();
    assert!((&back - &h).max_abs() < 1e-14);
    let bad = Array3::<Complex64>::zeros((5, 7, 6));
    assert!(plate_forward(&bad, &g).is_err());
}

#[test]
fn padded_evaluation_is_consistent() {
    let g = TorusGrid::canonical(5, 5, 4).unwrap();
    let f = random_field(&g, 1, 2);
    let fine = to_physical(&f, 11, 9);
    let back = from_physical(&fine, &g).unwrap();
    assert!((&back - &f).max_abs() < 1e-14);
}
