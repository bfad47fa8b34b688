//! The local ring k[[x,y]] seen through its finite truncations k[x,y]/m^n.

pub mod ideal;
pub mod monomial;
pub mod poly;

pub use ideal::{Adequacy, LocalIdeal};
pub use poly::{PolyElement, TruncatedAlgebra};
