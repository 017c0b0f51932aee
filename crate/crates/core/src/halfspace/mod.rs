//! Explicit half-space solution of the linearised problem and the Fourier
//! multiplier of the coupled plate equation.

mod scan;
mod symbols;

pub use scan::*;
pub use symbols::*;
