//! Homology and persistent homology of super-level sets of density and
//! regression functions, estimated from samples.

// NaN inputs must fail the range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod complexes;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod homology;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod persistence;

pub use error::{Error, Result};
pub use geometry::PointCloud;
