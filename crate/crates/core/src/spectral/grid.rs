use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::chebyshev::Chebyshev;
use crate::error::{Error, Result};

/// Integer lattice point `(k, xi)`: time frequency in units of `2 pi / T`,
/// lateral wave vector in units of `2 pi / L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub k: i64,
    pub xi: [i64; 2],
}

impl ModeIndex {
    pub const fn new(k: i64, xi: [i64; 2]) -> Self {
        Self { k, xi }
    }

    pub fn conj(self) -> Self {
        Self { k: -self.k, xi: [-self.xi[0], -self.xi[1]] }
    }

    pub fn is_steady(self) -> bool {
        self.k == 0
    }

    pub fn is_lateral_mean(self) -> bool {
        self.xi == [0, 0]
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, xi=({}, {}))", self.k, self.xi[0], self.xi[1])
    }
}

/// Discretisation of `T x T0^2 x (0, 1)`: a symmetric block of Fourier modes
/// in time and in both lateral directions, Chebyshev-Lobatto nodes in `x3`.
#[derive(Clone)]
pub struct TorusGrid {
    period_t: f64,
    period_x: f64,
    n_t: usize,
    n_x: usize,
    cheb: Arc<Chebyshev>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("period_t", &self.period_t)
            .field("period_x", &self.period_x)
            .field("n_t", &self.n_t)
            .field("n_x", &self.n_x)
            .field("n_z", &self.n_z())
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.period_t == other.period_t
            && self.period_x == other.period_x
            && self.n_t == other.n_t
            && self.n_x == other.n_x
            && self.n_z() == other.n_z()
    }
}

impl TorusGrid {
    pub fn new(period_t: f64, period_x: f64, n_t: usize, n_x: usize, n_z: usize) -> Result<Self> {
        if n_t < 3 || n_t.is_multiple_of(2) {
            return Err(Error::Grid(format!("n_t must be odd and >= 3, got {n_t}")));
        }
        if n_x < 3 || n_x.is_multiple_of(2) {
            return Err(Error::Grid(format!("n_x must be odd and >= 3, got {n_x}")));
        }
        if n_z < 4 {
            return Err(Error::Grid(format!("n_z must be >= 4, got {n_z}")));
        }
        if !(period_t > 0.0 && period_x > 0.0) {
            return Err(Error::Grid("periods must be positive".into()));
        }
        Ok(Self { period_t, period_x, n_t, n_x, cheb: Arc::new(Chebyshev::new(n_z)) })
    }

    /// `T = L = 2 pi`, so the mode lattice is `Z x Z^2`.
    pub fn canonical(n_t: usize, n_x: usize, n_z: usize) -> Result<Self> {
        Self::new(2.0 * PI, 2.0 * PI, n_t, n_x, n_z)
    }

    pub fn period_t(&self) -> f64 {
        self.period_t
    }

    pub fn period_x(&self) -> f64 {
        self.period_x
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_z(&self) -> usize {
        self.cheb.degree()
    }

    pub fn n_nodes(&self) -> usize {
        self.cheb.len()
    }

    pub fn cheb(&self) -> &Chebyshev {
        &self.cheb
    }

    pub fn nodes(&self) -> &[f64] {
        self.cheb.nodes()
    }

    pub fn k_max(&self) -> i64 {
        (self.n_t as i64 - 1) / 2
    }

    pub fn xi_max(&self) -> i64 {
        (self.n_x as i64 - 1) / 2
    }

    pub fn k_of(&self, idx: usize) -> i64 {
        idx as i64 - self.k_max()
    }

    pub fn xi_of(&self, idx: usize) -> i64 {
        idx as i64 - self.xi_max()
    }

    pub fn k_index(&self, k: i64) -> Option<usize> {
        (k.abs() <= self.k_max()).then(|| (k + self.k_max()) as usize)
    }

    pub fn xi_index(&self, xi: i64) -> Option<usize> {
        (xi.abs() <= self.xi_max()).then(|| (xi + self.xi_max()) as usize)
    }

    pub fn contains(&self, m: ModeIndex) -> bool {
        self.k_index(m.k).is_some() && self.xi_index(m.xi[0]).is_some() && self.xi_index(m.xi[1]).is_some()
    }

    /// Physical time frequency `2 pi k / T`.
    pub fn omega(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.period_t
    }

    /// Physical wave vector `2 pi xi / L`.
    pub fn wavevector(&self, xi: [i64; 2]) -> [f64; 2] {
        let s = 2.0 * PI / self.period_x;
        [s * xi[0] as f64, s * xi[1] as f64]
    }

    pub fn wavenumber_sq(&self, xi: [i64; 2]) -> f64 {
        let w = self.wavevector(xi);
        w[0] * w[0] + w[1] * w[1]
    }

    /// All retained modes in storage order.
    pub fn modes(&self) -> Vec<ModeIndex> {
        let mut out = Vec::with_capacity(self.n_t * self.n_x * self.n_x);
        for it in 0..self.n_t {
            for i1 in 0..self.n_x {
                for i2 in 0..self.n_x {
                    out.push(ModeIndex::new(self.k_of(it), [self.xi_of(i1), self.xi_of(i2)]));
                }
            }
        }
        out
    }

    pub fn sample_times(&self) -> Vec<f64> {
        (0..self.n_t).map(|j| self.period_t * j as f64 / self.n_t as f64).collect()
    }

    pub fn sample_positions(&self) -> Vec<f64> {
        (0..self.n_x).map(|j| self.period_x * j as f64 / self.n_x as f64).collect()
    }

    /// Same periods and Chebyshev degree with a different Fourier truncation.
    pub fn with_modes(&self, n_t: usize, n_x: usize) -> Result<Self> {
        if n_t < 3 || n_t.is_multiple_of(2) || n_x < 3 || n_x.is_multiple_of(2) {
            return Err(Error::Grid(format!("mode counts must be odd and >= 3, got ({n_t}, {n_x})")));
        }
        Ok(Self { period_t: self.period_t, period_x: self.period_x, n_t, n_x, cheb: self.cheb.clone() })
    }

    pub fn with_degree(&self, n_z: usize) -> Result<Self> {
        Self::new(self.period_t, self.period_x, self.n_t, self.n_x, n_z)
    }

    /// Odd mode counts large enough for 2/3-rule dealiased quadratic products.
    pub fn padded(&self) -> Self {
        let pad = |n: usize| {
            let m = (3 * n).div_ceil(2);
            if m.is_multiple_of(2) {
                m + 1
            } else {
                m
            }
        };
        self.with_modes(pad(self.n_t), pad(self.n_x)).expect("padding preserves oddness")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_or_small_counts() {
        assert!(TorusGrid::canonical(4, 5, 8).is_err());
        assert!(TorusGrid::canonical(5, 1, 8).is_err());
        assert!(TorusGrid::canonical(5, 5, 3).is_err());
        assert!(TorusGrid::canonical(3, 3, 4).is_ok());
    }

    #[test]
    fn index_round_trip() {
        let g = TorusGrid::canonical(7, 5, 8).unwrap();
        for i in 0..7 {
            assert_eq!(g.k_index(g.k_of(i)), Some(i));
        }
        assert_eq!(g.k_index(4), None);
        assert_eq!(g.xi_of(0), -2);
        assert_eq!(g.modes().len(), 7 * 25);
    }

    #[test]
    fn padded_grid_is_odd_and_larger() {
        let g = TorusGrid::canonical(7, 5, 8).unwrap().padded();
        assert_eq!(g.n_t() % 2, 1);
        assert!(g.n_t() >= 11 && g.n_x() >= 7);
    }
}
