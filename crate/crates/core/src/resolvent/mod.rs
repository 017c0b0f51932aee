//! Per-mode coupled Stokes/plate boundary-value problems, their assembly into
//! full fields, and the weak-form and energy oracles.

mod mode;
mod weak;

pub use mode::*;
pub use weak::*;
