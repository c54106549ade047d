//! Numerical laboratory for conformally invariant planar random processes:
//! self-avoiding walks, critical bond percolation, random walks and Brownian
//! motion (plain and obliquely reflected), chordal and radial Loewner
//! evolutions, and the exact formulas they are compared against.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod loewner;
pub mod par;
pub mod paths;
pub mod percolation;
pub mod rng;
pub mod saw;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{ComplexPoint, GridMask, GridSpec, PathKind, PlanarPath};
pub use par::Execution;
pub use rng::{RngStream, GENERATOR_ID};
