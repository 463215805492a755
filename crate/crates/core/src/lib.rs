pub mod algebra;
pub mod cli;
pub mod ap;
pub mod error;
pub mod geodesics;
pub mod orders;
pub mod progressions;
pub mod ramsey;

pub use error::{Error, Result};
