//! Constrained-degree percolation on hypercubic lattices: the dynamics, the
//! explorations comparing it with planar percolation, exact verification of
//! the numeric bounds those comparisons rely on, and Monte Carlo estimates.

pub mod bounds;
pub mod cli;
pub mod clocks;
pub mod dynamics;
pub mod error;
pub mod explore;
pub mod lattice;
pub mod mixed;
pub mod stats;

pub use error::{Error, Result};
