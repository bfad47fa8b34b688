//! Exact linear algebra over a prime field: the substrate for all ideal arithmetic.

pub mod field;
pub mod subspace;

pub use field::{PrimeField, DEFAULT_PRIME};
pub use subspace::{combine, kernel_combinations, Echelon, SparseVec, Subspace};
