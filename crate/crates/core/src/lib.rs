//! Entropy of sums `X + Z` where `X` is a continuous (usually Gaussian) random
//! variable and `Z` is an independent integer-valued random variable.
//!
//! The law of `X + Z` is the mixture `Σₖ pₖ f(x − k)`. Its differential entropy
//! falls short of `H(Z) + h(X)` by a non-negative deficit `δ(X, Z)`. This crate
//! evaluates that deficit two independent ways, checks it against Monte Carlo,
//! and implements closed-form upper and lower bounds on it.
//!
//! All entropies are in nats.

// reference literals carry full precision; `!(x > 0.0)` rejects NaN
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod distributions;
pub mod entropy;
mod error;
pub mod format;
pub mod landauer;
pub mod numerics;
pub mod validate;

pub use distributions::{
    BaseDensity, DiscreteLattice, GaussianDensity, MixtureDensity, UniformDensity,
};
pub use entropy::{EntropyMethod, EntropyValue, McConfig};
pub use error::{Error, Result};
pub use numerics::quadrature::{QuadratureConfig, QuadratureResult};
