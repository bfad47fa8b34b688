pub mod algebra;
pub mod cli;
pub mod error;
pub mod filtration;
pub mod joint_reduction;
pub mod koszul;
pub mod linalg;
pub mod polyfit;
pub mod presets;
pub mod session;
pub mod verify;

pub use error::{Error, Result};
