//! Exact continuants and continued fractions with bounded partial quotients.
//!
//! * [`continuant`]: words, continuants, matrices and identities
//! * [`semigroup`]: bounded enumeration, `F_A(x)` and denominator sets
//! * [`dimension`]: dimension fits and threshold constants
//! * [`ensemble`]: pre-ensembles, the parameter schedule and layered ensembles
//! * [`expsum`]: exponential sums over norm spectra and arc geometry
//! * [`dedekind`]: sawtooth sums and generalized Dedekind sums
//! * [`cache`] and [`workbench`]: persistence and the command-line layer
//!
//! The `examples/` directory has one runnable program per area.

pub mod cache;
pub mod continuant;
pub mod dedekind;
pub mod dimension;
pub mod ensemble;
pub mod error;
pub mod expsum;
pub mod precision;
pub mod semigroup;
pub mod workbench;

pub use continuant::{Alphabet, Mat2, Rational, Word};
pub use error::{Error, Result};
