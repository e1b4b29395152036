//! Exact and randomized computer algebra for R-matrices built from quiver
//! mutations on cylindric quivers: commutative Laurent/fraction arithmetic,
//! seed dynamics in several semifields, quantum tori with epsilon-commuting
//! generators, a randomized skew-field equality oracle, the geometric and
//! quantum geometric R-matrices, and loop symmetric functions on cylindric
//! networks.

pub mod error;
pub mod laurent;
pub mod modmat;
pub mod network;
pub mod qtorus;
pub mod quiver;
pub mod rmatrix;
pub mod scalar;
pub mod seed;
pub mod skew;

pub use error::Error;
