//! The problem on the moving domain pulled back to the reference slab: the
//! deformation, the nonlinear terms, the smallness gate and the fixed-point
//! solver.

mod bounds;
mod forcing;
mod geometry;
mod picard;
mod pointwise;
mod terms;

pub use bounds::*;
pub use forcing::*;
pub use geometry::*;
pub use picard::*;
pub use pointwise::PointState;
pub use terms::*;
