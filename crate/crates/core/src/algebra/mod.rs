//! Exact integer, residue-ring and quadratic-order arithmetic.

pub mod arith;
pub mod mat;
pub mod quad;
pub mod residue;
pub mod units;

pub use mat::{mat_mul, mat_pow, Mat};
pub use quad::{QuadInt, QuadUnit};
pub use residue::{mat_pow_mod, ResidueMat};
pub use units::{embed_unit_as_matrix, fundamental_unit, norm_one_fundamental_unit, unit_exponent};
