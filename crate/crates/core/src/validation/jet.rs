use std::ops::{Add, Mul, Neg, Sub};

/// Value and first three derivatives of a function of one variable at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; 4]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0])
    }

    pub fn var(x: f64) -> Self {
        Jet([x, 1.0, 0.0, 0.0])
    }

    /// `sin(a x)` at `x`.
    pub fn sin(a: f64, x: f64) -> Self {
        let (s, c) = (a * x).sin_cos();
        Jet([s, a * c, -a * a * s, -a * a * a * c])
    }

    pub fn cos(a: f64, x: f64) -> Self {
        let (s, c) = (a * x).sin_cos();
        Jet([c, -a * s, -a * a * c, a * a * a * s])
    }

    pub fn exp(a: f64, x: f64) -> Self {
        let e = (a * x).exp();
        Jet([e, a * e, a * a * e, a * a * a * e])
    }

    pub fn d(&self, order: usize) -> f64 {
        self.0[order]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|v| -v))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let (f, g) = (self.0, o.0);
        Jet([
            f[0] * g[0],
            f[1] * g[0] + f[0] * g[1],
            f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2],
            f[3] * g[0] + 3.0 * f[2] * g[1] + 3.0 * f[1] * g[2] + f[0] * g[3],
        ])
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet(o.0.map(|v| self * v))
    }
}
