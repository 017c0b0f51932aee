use ndarray::s;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    dt, dx, dz, plate_dt, plate_dx, plate_to_physical, sobolev_norm, sobolev_norm_plate, to_physical, NormSpec,
    PlateField, SpectralField,
};

/// Exponents of a mixed-derivative embedding
/// `|d_x^{m_x} d_t^{m_t} u|_{L^r(L^p)} <= C |u|_{W^{m,q}(L^q) cap L^q(W^{2m,q})}`.
///
/// `p` or `r` equal to `f64::INFINITY` selects the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub m: u32,
    /// Spatial multi-index; the wall-normal entry must be 0 on the plate.
    pub m_x: [u32; 3],
    pub m_t: u32,
    pub alpha: f64,
    pub p: f64,
    pub r: f64,
    pub q: f64,
}

impl EmbeddingParams {
    fn spatial_order(&self) -> u32 {
        self.m_x.iter().sum()
    }

    /// The spatial smoothness left over after spending `alpha` on time.
    pub fn beta(&self) -> f64 {
        2.0 * (self.m as f64 - self.m_t as f64) - self.spatial_order() as f64 - self.alpha
    }

    /// Checks the admissibility conditions in spatial dimension `n`, naming
    /// the first one that fails.
    pub fn validate(&self, n: usize) -> Result<()> {
        let fail = |what: String| Err(Error::Parameters(what));
        let (m, mx, mt) = (self.m as f64, self.spatial_order() as f64, self.m_t as f64);
        let q = self.q;
        if !(q > 1.0 && q.is_finite()) {
            return fail(format!("1 < q < inf violated (q = {q})"));
        }
        if mx + 2.0 * mt > 2.0 * m {
            return fail(format!("|m_x| + 2 M_t <= 2m violated ({mx} + 2*{mt} > {})", 2.0 * m));
        }
        let top = 2.0 * (m - mt) - mx;
        if !(0.0..=top).contains(&self.alpha) {
            return fail(format!("0 <= alpha <= 2(m - M_t) - |m_x| violated (alpha = {}, bound {top})", self.alpha));
        }
        if self.r < q || self.p < q {
            return fail(format!("p, r >= q violated (p = {}, r = {}, q = {q})", self.p, self.r));
        }
        let aq = self.alpha * q;
        if aq < 2.0 && self.r > 2.0 * q / (2.0 - aq) {
            return fail(format!("r <= 2q/(2 - alpha q) violated (r = {}, bound {})", self.r, 2.0 * q / (2.0 - aq)));
        }
        if aq == 2.0 && self.r.is_infinite() {
            return fail("r < inf violated (alpha q = 2)".into());
        }
        let (b, nf) = (self.beta() * q, n as f64);
        if b < nf && self.p > nf * q / (nf - b) {
            return fail(format!("p <= nq/(n - beta q) violated (p = {}, bound {})", self.p, nf * q / (nf - b)));
        }
        if b == nf && self.p.is_infinite() {
            return fail("p < inf violated (beta q = n)".into());
        }
        if n == 2 && self.m_x[2] != 0 {
            return fail("wall-normal derivative requested on the plate".into());
        }
        Ok(())
    }
}

/// A field on which the embedding is measured.
#[derive(Debug, Clone, Copy)]
pub enum EmbeddingTarget<'a> {
    Slab(&'a SpectralField),
    Plate(&'a PlateField),
}

fn lp_mean(values: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    // (weight, magnitude) pairs, weights summing to one
    if p.is_infinite() {
        values.fold(0.0, |a, (_, v)| a.max(v))
    } else {
        values.map(|(w, v)| w * v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Ratio of the two sides of the embedding on a discrete field. A zero field
/// yields 0.
pub fn embedding_ratio(target: EmbeddingTarget<'_>, params: &EmbeddingParams) -> Result<f64> {
    let EmbeddingParams { m, m_x, m_t, p, r, q, .. } = *params;
    let (lhs, rhs) = match target {
        EmbeddingTarget::Slab(u) => {
            params.validate(3)?;
            let mut d = u.clone();
            for _ in 0..m_t {
                d = dt(&d);
            }
            for axis in 0..2 {
                for _ in 0..m_x[axis] {
                    d = dx(&d, axis);
                }
            }
            if m_x[2] > 0 {
                d = dz(&d, m_x[2] as usize);
            }
            let g = d.grid();
            let (mt, mx) = (2 * g.n_t() + 1, 2 * g.n_x() + 1);
            let phys = to_physical(&d, mt, mx);
            let w = g.cheb().weights().to_vec();
            let cells = (mx * mx) as f64;
            let per_time: Vec<f64> = (0..mt)
                .map(|it| {
                    let mut vals = Vec::with_capacity(mx * mx * w.len());
                    for i1 in 0..mx {
                        for i2 in 0..mx {
                            for (j, wj) in w.iter().enumerate() {
                                let mag2: f64 = phys.slice(s![it, i1, i2, j, ..]).iter().map(|v| v.norm_sqr()).sum();
                                vals.push((wj / cells, mag2.sqrt()));
                            }
                        }
                    }
                    lp_mean(vals.into_iter(), p)
                })
                .collect();
            let lhs = lp_mean(per_time.iter().map(|&v| (1.0 / mt as f64, v)), r);
            let rhs = sobolev_norm(u, &NormSpec::slab(m as u8, 0.0, q))?
                + sobolev_norm(u, &NormSpec::slab(0, 2.0 * m as f64, q))?;
            (lhs, rhs)
        }
        EmbeddingTarget::Plate(eta) => {
            params.validate(2)?;
            let mut d = eta.clone();
            for _ in 0..m_t {
                d = plate_dt(&d);
            }
            for axis in 0..2 {
                for _ in 0..m_x[axis] {
                    d = plate_dx(&d, axis);
                }
            }
            let g = d.grid();
            let (mt, mx) = (2 * g.n_t() + 1, 2 * g.n_x() + 1);
            let phys = plate_to_physical(&d, mt, mx);
            let cells = (mx * mx) as f64;
            let per_time: Vec<f64> = phys
                .outer_iter()
                .map(|slice| lp_mean(slice.iter().map(|v| (1.0 / cells, v.norm())), p))
                .collect();
            let lhs = lp_mean(per_time.iter().map(|&v| (1.0 / mt as f64, v)), r);
            let rhs = sobolev_norm_plate(eta, &NormSpec::plate(m as u8, 0.0, q))?
                + sobolev_norm_plate(eta, &NormSpec::plate(0, 2.0 * m as f64, q))?;
            (lhs, rhs)
        }
    };
    Ok(if rhs > 0.0 { lhs / rhs } else { 0.0 })
}
