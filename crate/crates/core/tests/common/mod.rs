#![allow(dead_code)]

use num_complex::Complex64;
use plateflow::{ModeIndex, PlateField, SpectralField, TorusGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn crand(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Random real band-limited slab field.
pub fn random_field(grid: &TorusGrid, comps: usize, seed: u64) -> SpectralField {
    let mut r = rng(seed);
    let mut f = SpectralField::from_modes(grid, comps, false, |_, _, _| crand(&mut r));
    f.symmetrize();
    f
}

pub fn random_plate(grid: &TorusGrid, seed: u64) -> PlateField {
    let mut r = rng(seed);
    let mut p = PlateField::from_modes(grid, false, |_| crand(&mut r));
    p.symmetrize();
    p
}

pub fn single_mode(grid: &TorusGrid, comps: usize, m: ModeIndex, value: Complex64) -> SpectralField {
    SpectralField::from_modes(grid, comps, false, |mm, _, _| if mm == m { value } else { Complex64::new(0.0, 0.0) })
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Smooth closed-form wall-normal profiles with analytic derivatives.
#[derive(Clone, Copy, Debug)]
pub enum Shape {
    /// `sin(pi x) e^{x/2}`: vanishes at both faces.
    Bubble,
    /// `(1 - x)^2 cos x`: one at the plate, zero at the lid.
    Blend,
    /// `cos x`.
    Cos,
    /// `e^x`.
    Exp,
    /// `x`.
    Linear,
}

impl Shape {
    /// Value, first and second derivative at `x`.
    pub fn eval(self, x: f64) -> [f64; 3] {
        use std::f64::consts::PI;
        match self {
            Shape::Bubble => {
                let e = (0.5 * x).exp();
                let (s, c) = ((PI * x).sin(), (PI * x).cos());
                [e * s, e * (0.5 * s + PI * c), e * ((0.25 - PI * PI) * s + PI * c)]
            }
            Shape::Blend => {
                let y = 1.0 - x;
                let (s, c) = (x.sin(), x.cos());
                [y * y * c, -2.0 * y * c - y * y * s, 2.0 * c + 4.0 * y * s - y * y * c]
            }
            Shape::Cos => [x.cos(), -x.sin(), -x.cos()],
            Shape::Exp => [x.exp(), x.exp(), x.exp()],
            Shape::Linear => [x, 1.0, 0.0],
        }
    }
}

/// A profile `sum_i c_i shape_i(x)`.
#[derive(Clone, Debug, Default)]
pub struct Profile(pub Vec<(Complex64, Shape)>);

impl Profile {
    pub fn term(c: Complex64, s: Shape) -> Self {
        Profile(vec![(c, s)])
    }

    pub fn plus(mut self, c: Complex64, s: Shape) -> Self {
        self.0.push((c, s));
        self
    }

    pub fn at(&self, x: f64, order: usize) -> Complex64 {
        self.0.iter().map(|(c, s)| c * s.eval(x)[order]).sum()
    }

    pub fn nodal(&self, nodes: &[f64], order: usize) -> Vec<Complex64> {
        nodes.iter().map(|&x| self.at(x, order)).collect()
    }
}
