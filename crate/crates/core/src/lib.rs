//! Simulation laboratory for the fluctuations of the log-determinant of
//! Gaussian tridiagonal β-ensembles evaluated near the spectral edge.
//!
//! The crate provides, bottom-up:
//!
//! * [`rng`] — a counter-based, stream-splittable random source with exact
//!   reproducibility guarantees (same seed + stream ⇒ same bits, on any
//!   thread layout);
//! * [`ensemble`] — tridiagonal Gaussian-ensemble sampling (α = 1 complex,
//!   α = 2 real symmetry class, general α > 0 interpolation) and the
//!   rank-one spike perturbation;
//! * [`logdet`] — the O(N) renormalized recurrence for
//!   `log|det(M̂/√N − 2θ·I)|` together with a Sturm-bisection eigenvalue
//!   oracle, both behind a name-keyed engine registry;
//! * [`edge`] — the edge-local decomposition of the recurrence: ratio and
//!   linearized traces, their explicit coefficient sequences, discrete
//!   weight sums, and variance predictions;
//! * [`clt`] — centering/scaling constants for the fluctuation theorems and
//!   deterministic shift evaluations;
//! * [`stats`] — Monte Carlo campaign driver, summary statistics with a
//!   normality test, Stieltjes-sum diagnostics, scaling-exponent fits, and
//!   the interlacing decimation check.

pub mod clt;
pub mod edge;
pub mod ensemble;
pub mod error;
pub mod logdet;
pub mod rng;
pub mod stats;
mod util;

pub use error::{Error, Result};
