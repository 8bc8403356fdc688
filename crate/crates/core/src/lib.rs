//! Euler calculus and integral geometry on explicit polyhedral data.
//!
//! Sets are axis-aligned grid regions or embedded simplicial sets, both
//! stored as finite unions of disjoint open cells. On top of that the crate
//! computes o-minimal Euler characteristics, intrinsic volumes μ_k (exactly
//! on grids, by Monte Carlo Crofton estimators otherwise), lower and upper
//! Hadwiger integrals of cellwise-constant and piecewise-linear functions,
//! and the Euclidean-invariant valuations built from them.

pub mod cli;
pub mod complex;
pub mod error;
pub mod function;
pub mod geom;
pub mod integrals;
pub mod io;
pub mod mc;
pub mod rng;
pub mod valuation;
pub mod volumes;

pub use error::{Error, ErrorKind, Result};
