//! Lowest-order weak Galerkin finite elements for 2D elliptic interface
//! problems on interface-fitted triangular meshes.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod element;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod problems;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Curve, GraphCurve, Point2, Polyline, Rect, RegionId, Vector2};
pub use mesh::{EdgeKind, MeshStats, TriMesh};
