//! Normed spaces, subspaces, and certified distances.

pub mod dist;
mod lp;
pub mod sample;
pub mod space;
pub mod subspace;

pub use dist::{dist_to_subspace, nearest_point, DistInterval, DistMethod};
pub use space::{Exponent, Field, Norm, NormedSpace};
pub use subspace::{subspace_algebra, AlgebraOp, AlgebraResult, Subspace};
