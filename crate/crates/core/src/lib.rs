pub mod degeneracy;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod resolution;
pub mod snarl;
pub mod wire;

pub use error::{Error, Result};
