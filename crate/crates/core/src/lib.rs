//! Larsson's two-parameter family of random Cantor sets and the multitype
//! branching process behind the question of whether `C2 - C1` contains an
//! interval.
//!
//! The crate is organized bottom-up:
//!
//! - [`params`]: admissible `(a, b)`, derived constants, region classification
//! - [`cantor`]: offset trees, level intervals, product squares, the type map
//! - [`kernel`]: offspring densities, the branching kernel `m(x, y)`
//! - [`typespace`]: construction of the type space `T(eps)` and support sets
//! - [`spectral`]: Nyström discretization and the Perron-Frobenius triple
//! - [`branching`]: exact simulation of the branching process
//! - [`diffset`]: Monte Carlo coverage of intervals by `Proj45(C1^n x C2^n)`
//! - [`render`]: deterministic SVG figures
//!
//! Everything is deterministic given a seed; parallel code paths (behind the
//! `parallel` feature) produce bitwise-identical results for any thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branching;
pub mod cantor;
pub mod diffset;
mod error;
pub mod export;
pub mod intervals;
pub mod kernel;
mod par;
pub mod params;
pub mod render;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod typespace;

pub use error::{Error, Result};
pub use intervals::{Interval, IntervalSet};
pub use par::set_workers;
pub use params::{DerivedConstants, Params, RegionClass};
pub use typespace::TypeSpace;
