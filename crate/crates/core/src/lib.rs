//! Exact computation with truncated Fourier expansions of Hilbert modular
//! forms over real quadratic fields of narrow class number one, aimed at
//! finding and certifying forms of partial weight one.

pub mod arithmetic;
pub mod cm;
pub mod data_io;
pub mod eisenstein;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod hecke;
pub mod linalg;
pub mod ray_class;
pub mod search;
pub mod synthetic;
mod weight;

pub use weight::WeightPair;

pub use error::{Error, Result};

/// Arbitrary precision rational numbers used for every exact coordinate.
pub type Rational = num_rational::BigRational;
