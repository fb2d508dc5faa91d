//! Exact algebra for deciding when Dehn surgery on Brunnian-type links can
//! produce a lens space.

pub mod alexander;
pub mod catalog;
pub mod cli;
pub mod cyclo;
pub mod error;
pub mod laurent;
pub mod obstruct;
pub mod scan;
pub mod surgery;
pub mod verify;

pub use error::{Error, Result};
pub use laurent::{LaurentPoly, Monomial, VarImage};
