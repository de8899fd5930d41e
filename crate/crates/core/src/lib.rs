//! Finite-state dimension toolkit: block entropies, Weyl sums, empirical and
//! analytic measures, streaming digit arithmetic and finite-state gamblers.

pub mod arithmetic;
pub mod entropy;
pub mod error;
pub mod gambler;
pub mod measures;
pub mod numeric;
pub mod params;
pub mod repro;
pub mod sequences;
pub mod weyl;

pub use error::{Error, Result};
pub use sequences::SymbolSequence;
