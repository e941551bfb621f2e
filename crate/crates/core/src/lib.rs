pub mod convergence;
pub mod error;
pub mod gamma_kernel;
pub mod integrand;
pub mod params;
pub mod quadrature;
mod ser;
pub mod series;
pub mod special_cases;

pub use error::{Error, Result};
pub use params::{GammaTriple, IFunctionParams};
