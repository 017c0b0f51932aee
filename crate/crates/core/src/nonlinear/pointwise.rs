//! Nonlinear terms at a single point, shared by the grid evaluation and by
//! point-wise checks.

/// Unknowns and the derivatives entering the nonlinear terms at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointState {
    pub x3: f64,
    pub eta: f64,
    pub eta_t: f64,
    pub eta_x: [f64; 2],
    /// Pure second derivatives `d_1^2 eta`, `d_2^2 eta`.
    pub eta_xx: [f64; 2],
    pub u: [f64; 3],
    /// `du[i][k] = d_k u_i`.
    pub du: [[f64; 3]; 3],
    /// `du3[i][k] = d_3 d_k u_i`.
    pub du3: [[f64; 3]; 3],
    pub p: f64,
    pub dp3: f64,
}

impl PointState {
    fn rho(&self) -> f64 {
        1.0 - self.x3
    }

    /// Third row of the geometry matrix; the other two rows vanish.
    pub fn e_row(&self) -> [f64; 3] {
        let d = 1.0 + self.eta;
        let r = self.rho();
        [r * self.eta_x[0] / d, r * self.eta_x[1] / d, -self.eta / d]
    }

    /// Full nonlinear momentum forcing: the geometric terms minus the flat
    /// convection `(u . grad) u`.
    pub fn momentum(&self, mu: f64) -> [f64; 3] {
        let d = 1.0 + self.eta;
        let r = self.rho();
        let e = self.e_row();
        let a = r * self.eta_t / d;
        // first-order coefficient of d_3 in sum_k D_k D_k, D_k = d_k + e_k d_3
        let mut first = 0.0;
        let mut second = (1.0 + e[2]).powi(2) - 1.0;
        for k in 0..2 {
            let de = r * (self.eta_xx[k] / d - (self.eta_x[k] / d).powi(2));
            let d3e = -self.eta_x[k] / d;
            first += de + e[k] * d3e;
            second += e[k] * e[k];
        }
        let ue: f64 = (0..3).map(|k| self.u[k] * e[k]).sum();
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let dz = self.du[i][2];
            let mixed = 2.0 * (e[0] * self.du3[i][0] + e[1] * self.du3[i][1]);
            let viscous = first * dz + mixed + second * self.du3[i][2];
            let flat: f64 = (0..3).map(|k| self.u[k] * self.du[i][k]).sum();
            *o = -a * dz + mu * viscous - ue * dz - e[i] * self.dp3 - flat;
        }
        out
    }

    /// The vector field whose divergence is the continuity defect.
    pub fn divergence_vector(&self) -> [f64; 3] {
        let r = self.rho();
        [
            -self.eta * self.u[0],
            -self.eta * self.u[1],
            -r * (self.eta_x[0] * self.u[0] + self.eta_x[1] * self.u[1]),
        ]
    }

    /// Unit normal of the deformed plate, pointing out of the fluid.
    pub fn normal(&self) -> [f64; 3] {
        let s = (1.0 + self.eta_x[0].powi(2) + self.eta_x[1].powi(2)).sqrt();
        [-self.eta_x[0] / s, -self.eta_x[1] / s, -1.0 / s]
    }

    /// Geometric correction of the viscous stress at the plate.
    pub fn boundary_stress(&self, mu: f64) -> [[f64; 3]; 3] {
        let e = self.e_row();
        let mut s = [[0.0; 3]; 3];
        for (i, row) in s.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = mu * (self.du[i][2] * e[k] + self.du[k][2] * e[i]);
            }
        }
        s
    }

    /// Plate forcing beyond the flat traction: `e3 . [T (nu + e3) + S nu]`
    /// evaluated at `x3 = 0`.
    pub fn plate_forcing(&self, mu: f64) -> f64 {
        let nu = self.normal();
        let s = self.boundary_stress(mu);
        let mut out = 0.0;
        for j in 0..3 {
            let t = mu * (self.du[2][j] + self.du[j][2]) - if j == 2 { self.p } else { 0.0 };
            let shift = if j == 2 { 1.0 } else { 0.0 };
            out += t * (nu[j] + shift) + s[2][j] * nu[j];
        }
        out
    }
}
