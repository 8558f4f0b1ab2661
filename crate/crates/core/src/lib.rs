//! Exact computations for the multi-type TASEP on a ring and its continuous
//! limit.
//!
//! The crate covers the discrete chain (transition matrices, exact and Monte
//! Carlo stationary distributions), Ferrari–Martin multiline queues and their
//! continuous version, determinant and lattice-path counting formulas, the
//! density polynomials of the continuous limit, two-point correlations,
//! tableau counting, and the Temperley–Lieb chain on linking patterns.
//!
//! All probabilities, counts and coefficients are exact rationals; floating
//! point only appears in Monte Carlo estimators.

pub mod continuum;
pub mod count;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod mlq;
pub mod poly;
pub mod primitives;
pub mod rs;
pub mod tableaux;

pub use error::{Error, Result};
pub use linalg::{det_fraction_free, RationalMatrix};
pub use markov::{tasep_step, StationaryDist};
pub use mlq::{Arrangement, DiscreteMLQ, LabeledMLQ};
pub use primitives::{
    binomial, cyclic_canonical, Permutation, Rational, RingWord, Site, TypeVector,
};
