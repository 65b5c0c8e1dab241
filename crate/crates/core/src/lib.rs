//! Library solving the matrix code equivalence problem: given equivalent
//! k-dimensional matrix codes C, D in F_q^{m x n}, recover invertible P, Q
//! with D = P C Q^{-1}. The search reduces equivalence to matrix-code
//! conjugacy through one-dimensional hulls, finds colliding normalized
//! characteristic polynomials of hull generators, solves the resulting
//! conjugacy instances, and recovers Q by linear algebra.

// Index loops below follow the usual matrix (i, j) notation.
#![allow(clippy::needless_range_loop)]

pub mod attack;
pub mod canon;
pub mod code;
pub mod conjugacy;
pub mod field;
pub mod instances;
pub mod matspace;
pub mod rng;
