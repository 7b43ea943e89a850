pub mod band;
pub mod dieudonne;
pub mod dynamics;
pub mod error;
pub mod figures;
pub mod hermite;
pub mod hermitization;
pub mod linalg;
pub mod output;
pub mod positivity;
pub mod quadrature;
pub mod tridiag;

pub use error::{Error, Result};
pub use nalgebra::DMatrix;
