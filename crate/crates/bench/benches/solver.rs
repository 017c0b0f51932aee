use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use plateflow::halfspace::{boundedness_scan, HalfSpace};
use plateflow::linear::LinearSolver;
use plateflow::nonlinear::compute_nonlinear_terms;
use plateflow::resolvent::{solve_oscillatory_mode, ModeData, ModeOperator};
use plateflow::spectral::{forward_transform, inverse_transform};
use plateflow::validation::{make_manufactured, ManufacturedKnobs};
use plateflow::{Complex64, ModeIndex, SolverConfig, SpectralField, TorusGrid};

fn transforms(c: &mut Criterion) {
    let grid = TorusGrid::canonical(17, 17, 32).unwrap();
    let f = SpectralField::from_modes(&grid, 3, false, |m, j, comp| {
        Complex64::new(1.0 / (1.0 + (m.k * m.k + m.xi[0] * m.xi[0]) as f64), (j + comp) as f64 * 1e-3)
    });
    let phys = inverse_transform(&f);
    c.bench_function("inverse transform 17x17x17x33x3", |b| b.iter(|| inverse_transform(black_box(&f))));
    c.bench_function("forward transform 17x17x17x33x3", |b| b.iter(|| forward_transform(black_box(&phys), &grid).unwrap()));
}

fn mode_solves(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let grid = TorusGrid::canonical(5, 5, 32).unwrap();
    let m = ModeIndex::new(2, [1, -1]);
    let mut data = ModeData::zeros(grid.n_nodes());
    for (j, x) in grid.nodes().iter().enumerate() {
        data.f[0][j] = Complex64::new(x.cos(), 0.0);
        data.f[2][j] = Complex64::new(0.0, x.exp());
    }
    data.h = Complex64::new(1.0, -0.5);
    c.bench_function("oscillatory mode solve N_z=32", |b| b.iter(|| solve_oscillatory_mode(&grid, &cfg, m, black_box(&data)).unwrap()));
    let op = ModeOperator::new(&grid, &cfg, m).unwrap();
    c.bench_function("cached mode operator solve N_z=32", |b| b.iter(|| op.solve(black_box(&data), cfg.tol_eq).unwrap()));

    let cfg = cfg.with_truncation(5, 5, 16);
    let case = make_manufactured(&cfg, 1, ManufacturedKnobs::default()).unwrap();
    let solver = LinearSolver::new(&cfg, true).unwrap();
    c.bench_function("linear pipeline 5x5x5x17", |b| b.iter(|| solver.solve(&case.f, &case.g, &case.h).unwrap()));
    let (u, p, eta) = (case.u.scaled(1e-2), case.p.scaled(1e-2), case.eta.scaled(1e-2));
    c.bench_function("nonlinear terms 5x5x5x17", |b| b.iter(|| compute_nonlinear_terms(1.0, &u, &p, &eta).unwrap()));
}

fn multiplier_scan(c: &mut Criterion) {
    let hs = HalfSpace::default();
    let mut g = c.benchmark_group("multiplier scan");
    g.sample_size(10);
    g.bench_function("k <= 1000, |xi| <= 20", |b| b.iter(|| boundedness_scan(&hs, black_box(1000), 20).unwrap()));
    g.finish();
}

criterion_group!(benches, transforms, mode_solves, multiplier_scan);
criterion_main!(benches);
