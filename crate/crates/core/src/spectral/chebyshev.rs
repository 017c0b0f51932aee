//! Chebyshev-Gauss-Lobatto machinery on the unit interval.
//!
//! Nodes are `x_j = sin^2(pi j / 2N)`, so node 0 sits on the plate face
//! `x3 = 0` and node `N` on the rigid lid `x3 = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct Chebyshev {
    degree: usize,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
    weights: Vec<f64>,
    cumulative: OnceLock<DMatrix<f64>>,
}

impl Chebyshev {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1, "Chebyshev degree must be at least 1");
        let n = degree;
        let nodes: Vec<f64> = (0..=n)
            .map(|j| {
                let s = (PI * j as f64 / (2.0 * n as f64)).sin();
                s * s
            })
            .collect();
        let bary: Vec<f64> = (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();

        // x_i - x_j in product form avoids cancellation near the faces.
        let diff = |i: usize, j: usize| {
            let a = PI * (i + j) as f64 / (2.0 * n as f64);
            let b = PI * (i as f64 - j as f64) / (2.0 * n as f64);
            a.sin() * b.sin()
        };
        let mut d1 = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..=n {
            let mut row_sum = 0.0;
            for j in 0..=n {
                if i != j {
                    let v = (bary[j] / bary[i]) / diff(i, j);
                    d1[(i, j)] = v;
                    row_sum += v;
                }
            }
            d1[(i, i)] = -row_sum;
        }
        let d2 = &d1 * &d1;
        let weights = clenshaw_curtis(n);
        Self { degree: n, nodes, bary, d1, d2, weights, cumulative: OnceLock::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Clenshaw-Curtis weights on `[0, 1]`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        &self.d2
    }

    pub fn matrix(&self, order: usize) -> &DMatrix<f64> {
        match order {
            1 => &self.d1,
            2 => &self.d2,
            _ => panic!("derivative order must be 1 or 2"),
        }
    }

    /// Applies the order-1 or order-2 differentiation matrix to nodal values.
    pub fn differentiate(&self, profile: &[Complex64], order: usize) -> Vec<Complex64> {
        assert_eq!(profile.len(), self.len());
        let m = self.matrix(order);
        (0..self.len())
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, v) in profile.iter().enumerate() {
                    acc += v * m[(i, j)];
                }
                acc
            })
            .collect()
    }

    pub fn differentiate_real(&self, profile: &[f64], order: usize) -> Vec<f64> {
        let m = self.matrix(order);
        (0..self.len())
            .map(|i| profile.iter().enumerate().map(|(j, v)| v * m[(i, j)]).sum())
            .collect()
    }

    /// Clenshaw-Curtis quadrature of nodal values over `[0, 1]`.
    pub fn integrate(&self, profile: &[Complex64]) -> Complex64 {
        profile.iter().zip(&self.weights).map(|(v, w)| v * *w).sum()
    }

    /// Matrix `Q` with `(Q v)_i = int_0^{x_i} p(s) ds` for the interpolant `p`
    /// of the nodal values `v`. Built on first use.
    pub fn cumulative_integral(&self) -> &DMatrix<f64> {
        self.cumulative.get_or_init(|| {
            let n = self.len();
            let mut q = DMatrix::<f64>::zeros(n, n);
            let mut unit = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                unit[j] = Complex64::new(1.0, 0.0);
                for i in 1..n {
                    let xi = self.nodes[i];
                    // The Lobatto rule on n nodes is exact for the degree-N cardinal function.
                    let acc: f64 = self
                        .nodes
                        .iter()
                        .zip(&self.weights)
                        .map(|(&s, &w)| w * self.interpolate(&unit, xi * s).re)
                        .sum();
                    q[(i, j)] = xi * acc;
                }
                unit[j] = Complex64::new(0.0, 0.0);
            }
            q
        })
    }

    /// Barycentric interpolation of nodal values at an arbitrary point.
    pub fn interpolate(&self, profile: &[Complex64], x: f64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for (j, &xj) in self.nodes.iter().enumerate() {
            let dx = x - xj;
            if dx == 0.0 {
                return profile[j];
            }
            let c = self.bary[j] / dx;
            num += profile[j] * c;
            den += c;
        }
        num / den
    }

    /// Values of the node interpolant on the nodes of another Chebyshev grid.
    pub fn resample(&self, profile: &[Complex64], target: &Chebyshev) -> Vec<Complex64> {
        target.nodes.iter().map(|&x| self.interpolate(profile, x)).collect()
    }
}

/// Clenshaw-Curtis weights for the `N + 1` Lobatto nodes, scaled to `[0, 1]`.
fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    if n == 1 {
        return vec![0.5, 0.5];
    }
    let mut v = vec![1.0; n - 1];
    if n.is_multiple_of(2) {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                let theta = PI * (i + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (i, vi) in v.iter_mut().enumerate() {
            let theta = PI * (i + 1) as f64 / nf;
            *vi -= (nf * theta).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                let theta = PI * (i + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (i, vi) in v.into_iter().enumerate() {
        w[i + 1] = 2.0 * vi / nf;
    }
    // [-1, 1] -> [0, 1]
    w.iter().map(|x| 0.5 * x).collect()
}
