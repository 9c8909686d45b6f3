//! Exact-arithmetic toolkit for classical and dynamical approximation
//! spectra over symbolic dynamics.
//!
//! The crate computes Lagrange and Markov values of continued fractions and
//! quadratic forms, samples dynamical spectra of subshifts of finite type,
//! brackets Hausdorff dimensions of regular Cantor sets and linear Markov
//! horseshoes through Moran-type covering equations, verifies arithmetic-sum
//! interval claims, and checks quantitative combinatorial selection bounds
//! (dense matrix cores, transition pruning, interference-free selection,
//! random injections).
//!
//! Every numeric result is either an exact `BigRational` or a two-sided
//! rational [`Enclosure`]; no floating point enters any computation.

pub mod arith;
pub mod cantor;
pub mod cf;
pub mod combinat;
mod dyadic;
pub mod enclosure;
pub mod error;
pub mod horseshoe;
pub mod symbolic;

pub use enclosure::Enclosure;
pub use error::{Error, Result};
