//! Entropy-rate estimation for discrete time series by sampling the full
//! Bayesian posterior over variable-memory Markov chains (context trees).
//!
//! The pipeline is:
//!
//! 1. [`sequence`]: parse and validate a symbol sequence over `{0, …, m-1}`.
//! 2. [`ctw`]: build the maximal count tree, compute Krichevsky–Trofimov and
//!    weighted probabilities in the log domain.
//! 3. [`posterior`]: draw exact i.i.d. samples `(T, θ)` from the joint
//!    posterior over tree models and their leaf parameters.
//! 4. [`entropy`]: map every sample to its entropy rate and [`summary`]
//!    condense the resulting values.
//!
//! [`baselines`] holds the comparison estimators (plug-in, increasing-window
//! Lempel–Ziv, interpolated PPM) and [`simulator`] generates data from known
//! chains. All entropies are in nats.

pub mod baselines;
pub mod ctw;
pub mod entropy;
pub mod error;
pub mod pipeline;
pub mod posterior;
pub mod rng;
pub mod sequence;
pub mod simulator;
pub mod summary;
pub mod tree;

pub use error::{Error, ErrorKind, Result};
pub use sequence::{Alphabet, Sequence, Symbol};
