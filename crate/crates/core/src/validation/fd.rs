use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{partial, SpectralField};

type C = Complex64;

const STENCIL: [(f64, f64); 6] = [(-3.0, -1.0), (-2.0, 9.0), (-1.0, -45.0), (1.0, 45.0), (2.0, -9.0), (3.0, 1.0)];
const SAMPLE_POINTS: usize = 12;
const OVERSAMPLING: f64 = 64.0;

/// Evaluates every component of `field` at one point by direct summation of
/// the modes and barycentric interpolation in `x3`.
pub fn evaluate(field: &SpectralField, t: f64, x: [f64; 2], x3: f64) -> Vec<C> {
    let grid = field.grid();
    let cheb = grid.cheb();
    let mut profiles = vec![vec![C::new(0.0, 0.0); grid.n_nodes()]; field.components()];
    for m in grid.modes() {
        let xi = grid.wavevector(m.xi);
        let phase = C::from_polar(1.0, grid.omega(m.k) * t + xi[0] * x[0] + xi[1] * x[1]);
        for (c, prof) in profiles.iter_mut().enumerate() {
            for (j, v) in prof.iter_mut().enumerate() {
                *v += field.get(m, j, c) * phase;
            }
        }
    }
    profiles.iter().map(|p| cheb.interpolate(p, x3)).collect()
}

/// Largest discrepancy between the spectral derivative of `field` along
/// `direction` (0 = t, 1 and 2 lateral, 3 wall-normal) and a sixth-order
/// centred difference with step one 64th of the grid spacing.
pub fn fd_check(field: &SpectralField, direction: usize) -> Result<f64> {
    if direction > 3 {
        return Err(Error::Parameters(format!("direction {direction} outside 0..=3")));
    }
    let grid = field.grid();
    let spectral = partial(field, direction);
    let h = match direction {
        0 => grid.period_t() / (OVERSAMPLING * grid.n_t() as f64),
        1 | 2 => grid.period_x() / (OVERSAMPLING * grid.n_x() as f64),
        _ => 1.0 / (OVERSAMPLING * grid.n_z().max(1) as f64),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLE_POINTS {
        let t = rng.gen_range(0.0..grid.period_t());
        let x = [rng.gen_range(0.0..grid.period_x()), rng.gen_range(0.0..grid.period_x())];
        // keep the stencil inside the slab
        let x3 = rng.gen_range(0.1..0.9);
        let exact = evaluate(&spectral, t, x, x3);
        let mut approx = vec![C::new(0.0, 0.0); field.components()];
        for (offset, weight) in STENCIL {
            let s = offset * h;
            let vals = match direction {
                0 => evaluate(field, t + s, x, x3),
                1 => evaluate(field, t, [x[0] + s, x[1]], x3),
                2 => evaluate(field, t, [x[0], x[1] + s], x3),
                _ => evaluate(field, t, x, x3 + s),
            };
            for (a, v) in approx.iter_mut().zip(vals) {
                *a += v * (weight / (60.0 * h));
            }
        }
        for (a, e) in approx.iter().zip(&exact) {
            worst = worst.max((a - e).norm());
        }
    }
    Ok(worst)
}
