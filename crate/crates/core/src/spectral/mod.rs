//! Discrete Fourier analysis on the time-space torus and Chebyshev machinery
//! in the wall-normal direction.

mod chebyshev;
mod container;
mod field;
mod grid;
mod norms;
mod transform;

pub use chebyshev::Chebyshev;
pub use container::{read_field, read_field_json, read_plate, write_field, write_field_json, write_plate, MAGIC};
pub use field::{FieldRecord, PlateField, SpectralField};
pub use grid::{ModeIndex, TorusGrid};
pub use norms::*;
pub use transform::*;
