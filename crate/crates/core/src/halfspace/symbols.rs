use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

type C = Complex64;
const I: C = C::new(0.0, 1.0);

/// Periods and plate damping of the half-space model problem. Lattice
/// indices `(k, xi)` are mapped to `2 pi k / T` and `2 pi xi / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub period_t: f64,
    pub period_x: f64,
    /// Coefficient of the internal plate damping `i k mu_s |xi|^2`.
    pub mu_s: f64,
}

impl Default for HalfSpace {
    fn default() -> Self {
        Self { period_t: 2.0 * PI, period_x: 2.0 * PI, mu_s: 1.0 }
    }
}

/// The three additive pieces of the coupled plate symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolParts {
    /// `|xi|^4 - k^2`, the conservative plate part.
    pub undamped: C,
    /// `i k mu_s |xi|^2`, internal plate damping.
    pub internal: C,
    /// `-k^2/|xi| + i k (|xi| + lambda)`, the damping exerted by the fluid.
    pub fluid: C,
}

impl SymbolParts {
    pub fn total(&self) -> C {
        self.undamped + self.internal + self.fluid
    }
}

/// Value of the undamped multiplier, which may hit an exact pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Undamped {
    Finite(C),
    Singular,
}

impl Undamped {
    pub fn value(&self) -> Option<C> {
        match self {
            Undamped::Finite(v) => Some(*v),
            Undamped::Singular => None,
        }
    }
}

/// Wall-normal profiles of the explicit half-space solution, sampled at
/// the requested heights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfspaceProfiles {
    pub x3: Vec<f64>,
    pub u: Vec<[C; 2]>,
    pub v: Vec<C>,
    pub p: Vec<C>,
    pub q0: C,
}

/// Each profile as `a e^{-|xi| x3} + b e^{-lambda x3}`, so that derivatives
/// are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialForm {
    pub m: f64,
    pub lambda: C,
    pub u: [[C; 2]; 2],
    pub v: [C; 2],
    pub p: [C; 2],
}

impl ExponentialForm {
    fn eval(&self, coeffs: [C; 2], x3: f64, order: u32) -> C {
        let a = C::from(-self.m).powu(order) * (-self.m * x3).exp();
        let b = (-self.lambda).powu(order) * (-self.lambda * x3).exp();
        coeffs[0] * a + coeffs[1] * b
    }

    /// Sum of the magnitudes of the two exponential pieces; the scale
    /// against which cancellation is measured.
    fn magnitude(&self, coeffs: [C; 2], x3: f64, order: u32) -> f64 {
        let a = self.m.powi(order as i32) * (-self.m * x3).exp();
        let b = self.lambda.norm().powi(order as i32) * (-self.lambda.re * x3).exp();
        coeffs[0].norm() * a + coeffs[1].norm() * b
    }
}

/// Worst residuals of the explicit solution substituted into the mode
/// Stokes system, each relative to the summed magnitudes of its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubstitutionResiduals {
    pub momentum: f64,
    pub divergence: f64,
    /// `|U(0)|` and `|V(0) + i k eta|`.
    pub boundary: f64,
}

impl HalfSpace {
    pub fn frequency(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.period_t
    }

    pub fn wavevector(&self, xi: [i64; 2]) -> [f64; 2] {
        let c = 2.0 * PI / self.period_x;
        [c * xi[0] as f64, c * xi[1] as f64]
    }

    fn canonical(&self) -> bool {
        self.period_t == 2.0 * PI && self.period_x == 2.0 * PI
    }

    fn check(&self, k: i64, xi: [i64; 2]) -> Result<(f64, [f64; 2], f64, C)> {
        if k == 0 || xi == [0, 0] {
            return Err(Error::ExcludedMode { k, xi });
        }
        let (w, x) = (self.frequency(k), self.wavevector(xi));
        let m = x[0].hypot(x[1]);
        let lambda = C::new(m * m, w).sqrt();
        assert!(lambda.re > 0.0, "principal branch lost at (k = {k}, xi = {xi:?})");
        Ok((w, x, m, lambda))
    }

    /// `sqrt(|xi|^2 + i k)` on the principal branch.
    pub fn lambda(&self, k: i64, xi: [i64; 2]) -> Result<C> {
        self.check(k, xi).map(|(.., l)| l)
    }

    /// Boundary pressure amplitude driven by a plate displacement `eta`.
    pub fn q0_symbol(&self, k: i64, xi: [i64; 2], eta: C) -> Result<C> {
        let (w, _, m, lambda) = self.check(k, xi)?;
        Ok((-I * w * (m + lambda) + w * w / m) * eta)
    }

    pub fn exponential_form(&self, k: i64, xi: [i64; 2], eta: C) -> Result<ExponentialForm> {
        let (w, x, m, lambda) = self.check(k, xi)?;
        let q0 = self.q0_symbol(k, xi, eta)?;
        let iw = I * w;
        let u = [[-x[0] * q0 / w, x[0] * q0 / w], [-x[1] * q0 / w, x[1] * q0 / w]];
        let v = [m * q0 / iw, -(iw * eta + m * q0 / iw)];
        Ok(ExponentialForm { m, lambda, u, v, p: [q0, C::new(0.0, 0.0)] })
    }

    pub fn halfspace_profiles(&self, k: i64, xi: [i64; 2], eta: C, x3: &[f64]) -> Result<HalfspaceProfiles> {
        let e = self.exponential_form(k, xi, eta)?;
        Ok(HalfspaceProfiles {
            x3: x3.to_vec(),
            u: x3.iter().map(|&z| [e.eval(e.u[0], z, 0), e.eval(e.u[1], z, 0)]).collect(),
            v: x3.iter().map(|&z| e.eval(e.v, z, 0)).collect(),
            p: x3.iter().map(|&z| e.eval(e.p, z, 0)).collect(),
            q0: e.p[0],
        })
    }

    /// Substitutes the explicit solution into `(i k + |xi|^2 - d^2) U + i xi p`,
    /// `(i k + |xi|^2 - d^2) V + p'` and `i xi . U + V'` at every height.
    pub fn substitution_residuals(&self, k: i64, xi: [i64; 2], eta: C, x3: &[f64]) -> Result<SubstitutionResiduals> {
        let e = self.exponential_form(k, xi, eta)?;
        let (w, x) = (self.frequency(k), self.wavevector(xi));
        let sigma = C::new(e.m * e.m, w);
        let mut out = SubstitutionResiduals { momentum: 0.0, divergence: 0.0, boundary: 0.0 };
        for &z in x3 {
            let (p, pa) = (e.eval(e.p, z, 0), e.magnitude(e.p, z, 0));
            for c in 0..2 {
                let terms = [sigma * e.eval(e.u[c], z, 0), -e.eval(e.u[c], z, 2), I * x[c] * p];
                let scale = sigma.norm() * e.magnitude(e.u[c], z, 0) + e.magnitude(e.u[c], z, 2) + x[c].abs() * pa;
                out.momentum = out.momentum.max(relative(&terms, scale));
            }
            let terms = [sigma * e.eval(e.v, z, 0), -e.eval(e.v, z, 2), e.eval(e.p, z, 1)];
            let scale = sigma.norm() * e.magnitude(e.v, z, 0) + e.magnitude(e.v, z, 2) + e.magnitude(e.p, z, 1);
            out.momentum = out.momentum.max(relative(&terms, scale));
            let terms = [I * x[0] * e.eval(e.u[0], z, 0), I * x[1] * e.eval(e.u[1], z, 0), e.eval(e.v, z, 1)];
            let scale = x[0].abs() * e.magnitude(e.u[0], z, 0) + x[1].abs() * e.magnitude(e.u[1], z, 0) + e.magnitude(e.v, z, 1);
            out.divergence = out.divergence.max(relative(&terms, scale));
        }
        let u0 = [e.eval(e.u[0], 0.0, 0), e.eval(e.u[1], 0.0, 0)];
        let v0 = e.eval(e.v, 0.0, 0);
        out.boundary = u0[0].norm().max(u0[1].norm()).max((v0 + I * w * eta).norm());
        Ok(out)
    }

    pub fn symbol_parts(&self, k: i64, xi: [i64; 2]) -> Result<SymbolParts> {
        let (w, _, m, lambda) = self.check(k, xi)?;
        Ok(SymbolParts {
            undamped: C::from(m.powi(4) - w * w),
            internal: I * w * self.mu_s * m * m,
            fluid: -w * w / m + I * w * (m + lambda),
        })
    }

    /// Symbol of the plate equation after eliminating the fluid.
    pub fn coupled_plate_symbol(&self, k: i64, xi: [i64; 2]) -> Result<C> {
        self.symbol_parts(k, xi).map(|s| s.total())
    }

    /// Solution multiplier of the coupled problem; zero on excluded modes.
    pub fn multiplier(&self, k: i64, xi: [i64; 2]) -> C {
        match self.coupled_plate_symbol(k, xi) {
            Ok(s) => s.inv(),
            Err(_) => C::new(0.0, 0.0),
        }
    }

    /// `(1 + |k|^2 + |xi|^4) M(k, xi)`.
    pub fn weighted_multiplier(&self, k: i64, xi: [i64; 2]) -> C {
        let (w, x) = (self.frequency(k), self.wavevector(xi));
        let m2 = x[0] * x[0] + x[1] * x[1];
        self.multiplier(k, xi) * (1.0 + w * w + m2 * m2)
    }

    /// True when `|xi|^4 = k^2`; decided in integer arithmetic on the
    /// canonical torus.
    pub fn is_resonant(&self, k: i64, xi: [i64; 2]) -> bool {
        if k == 0 || xi == [0, 0] {
            return false;
        }
        if self.canonical() {
            let n = (xi[0] as i128).pow(2) + (xi[1] as i128).pow(2);
            n * n == (k as i128).pow(2)
        } else {
            let (w, x) = (self.frequency(k), self.wavevector(xi));
            let m4 = (x[0] * x[0] + x[1] * x[1]).powi(2);
            (m4 - w * w).abs() <= 1e-12 * (m4 + w * w)
        }
    }

    /// Multiplier with every damping term removed.
    pub fn undamped_multiplier(&self, k: i64, xi: [i64; 2]) -> Undamped {
        if k == 0 || xi == [0, 0] {
            return Undamped::Finite(C::new(0.0, 0.0));
        }
        if self.is_resonant(k, xi) {
            return Undamped::Singular;
        }
        let (w, x) = (self.frequency(k), self.wavevector(xi));
        let m2 = x[0] * x[0] + x[1] * x[1];
        Undamped::Finite(C::from(1.0 / (m2 * m2 - w * w)))
    }
}

fn relative(terms: &[C], scale: f64) -> f64 {
    let sum: C = terms.iter().sum();
    if scale == 0.0 {
        0.0
    } else {
        sum.norm() / scale
    }
}
