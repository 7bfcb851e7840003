pub mod algebra;
pub mod cli;
pub mod codes;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod random;
pub mod repn;

pub use error::{Error, Result};
