//! Sums and differences of lattice-point subsets of dilated integer polytopes.
//!
//! * [`geometry`]: facets, edges, strict antipodality and local point symmetry.
//! * [`lattice`]: `L(nP)`, sumsets, difference sets, missing counts.
//! * [`fringe`]: fixed presence patterns near the vertices that force a
//!   prescribed number of missing sums and differences.
//! * [`experiments`]: exact enumeration and Monte Carlo estimation of the
//!   proportions of subsets with given missing counts.

pub mod error;
pub mod experiments;
pub mod fringe;
pub mod geometry;
pub mod lattice;
pub mod lp;
pub mod point;

pub use error::{Error, Result};
pub use geometry::{GeometryReport, Polytope};
pub use lattice::{LatticeSet, SubsetMask};
pub use point::Point;
