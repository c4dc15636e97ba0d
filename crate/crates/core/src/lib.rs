//! Geometry of surfaces glued from constant-curvature geodesic triangles.
//!
//! The crate is organized around a handful of building blocks:
//!
//! - [`model`]: trigonometry of the simply connected model surfaces of
//!   constant curvature (angles and areas from side lengths, chart
//!   embeddings, distances between points interpolated along sides).
//! - [`polyhedron`]: surfaces built by gluing model triangles along
//!   equal-length edges, with vertex classes, total angles, singular
//!   curvature and a discrete Gauss-Bonnet check.
//! - [`surface`]: an approximate intrinsic metric on such surfaces via
//!   shortest paths on an edge-Steiner graph.
//! - [`gh`]: Gromov-Hausdorff machinery on finite metric spaces:
//!   correspondences, distortion, an exact small-instance solver and
//!   certified lower/upper bounds.
//! - [`approximation`]: polyhedral approximation of analytic target
//!   surfaces with convergence and semicontinuity experiments.
//! - [`smoothing`]: closed-form rotationally symmetric smoothing of a
//!   spherical cone point, with an ODE cross-check.
//! - [`estimators`]: sampling-based triangle-excess curvature
//!   estimators on polyhedral surfaces.
//! - [`io`]: text formats for polyhedra and finite metric spaces.

pub mod approximation;
pub mod estimators;
pub mod fixtures;
pub mod gh;
pub mod io;
pub mod model;
pub mod polyhedron;
pub mod smoothing;
pub mod surface;
pub mod tol;

pub use gh::{Correspondence, FiniteMetricSpace};
pub use model::{Curvature, ModelTriangle};
pub use polyhedron::{GluingMap, GluingPair, KPolyhedron};
pub use surface::{MetricGraph, SurfacePoint};
pub use tol::Tolerances;
