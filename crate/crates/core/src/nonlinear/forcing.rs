use ndarray::Array5;
use std::fmt;
use std::sync::Arc;

use super::geometry::{plate_samples, slab_coeffs, Deformation};
use crate::error::{Error, Result};
use crate::spectral::{PlateField, SpectralField, TorusGrid};

type ForceFn = dyn Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync;

/// Volume force acting on the fluid.
#[derive(Clone)]
pub enum Forcing {
    /// Already expressed on the reference slab.
    Reference(SpectralField),
    /// Closed form in current coordinates `f(t, y)`; it is composed with the
    /// deformation at every evaluation.
    Eulerian(Arc<ForceFn>),
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Reference(_) => f.write_str("Forcing::Reference"),
            Forcing::Eulerian(_) => f.write_str("Forcing::Eulerian"),
        }
    }
}

impl Forcing {
    pub fn eulerian(f: impl Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Forcing::Eulerian(Arc::new(f))
    }

    /// The force on the reference slab for plate displacement `eta`.
    pub fn pulled_back(&self, grid: &TorusGrid, eta: &PlateField) -> Result<SpectralField> {
        match self {
            Forcing::Reference(f) => {
                if f.grid() != grid || f.components() != 3 {
                    return Err(Error::Shape("forcing must be a vector field on the solver grid".into()));
                }
                Ok(f.clone())
            }
            Forcing::Eulerian(func) => {
                Deformation::new(eta)?;
                let pad = grid.padded();
                let (mt, mx) = (pad.n_t(), pad.n_x());
                let e = plate_samples(eta, mt, mx);
                let nodes = grid.nodes();
                let (dt, dx) = (grid.period_t() / mt as f64, grid.period_x() / mx as f64);
                let mut out = Array5::<f64>::zeros((mt, mx, mx, nodes.len(), 3));
                for ((it, i1, i2), &ev) in e.indexed_iter() {
                    for (j, &x3) in nodes.iter().enumerate() {
                        let y = [i1 as f64 * dx, i2 as f64 * dx, x3 - (1.0 - x3) * ev];
                        let v = func(it as f64 * dt, y);
                        for c in 0..3 {
                            out[[it, i1, i2, j, c]] = v[c];
                        }
                    }
                }
                Ok(slab_coeffs(&out, grid))
            }
        }
    }
}
