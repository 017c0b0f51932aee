//! Independent checks of the solvers: manufactured solutions, a
//! finite-difference derivative oracle, dual-path cross-validation and
//! empirical embedding constants, plus the suite that runs them in batch.

mod cross;
mod embedding;
mod fd;
mod jet;
mod manufactured;
mod suite;

pub use cross::*;
pub use embedding::*;
pub use fd::*;
pub use jet::Jet;
pub use manufactured::*;
pub use suite::*;
