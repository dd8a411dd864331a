//! Torsion functions, torsional rigidity and ground-state energies for
//! Laplacians on compact metric graphs.
//!
//! Every vertex carries either a δ-condition of some (possibly negative)
//! strength or a Dirichlet condition. On each edge the torsion function solves
//! `-u'' = 1`, so it is an explicit downward parabola once its vertex values
//! are known; those come from a symmetric `|V| x |V|` system (see
//! [`torsion::assemble_system`]). The remaining modules build on that:
//!
//! | module | contents |
//! |--------|----------|
//! | [`graph`] | metric multigraph model, validation, connectivity, JSON format |
//! | [`numerics`] | dense symmetric kernels (solve, eigen, inertia, bisection) |
//! | [`torsion`] | torsion function, rigidity, positivity verdict, Pólya quotient |
//! | [`spectral`] | first eigenvalue via P1 finite elements, interval secular equation |
//! | [`surgery`] | graph transformations (lengthen, scale, glue, cut, insert, unfold) |
//! | [`calculus`] | derivatives of the rigidity in edge lengths and strengths |
//! | [`bounds`] | two-sided rigidity bounds and the Kohler-Jobin explorer |
//! | [`fixtures`] | named reference graphs with machine-checkable expectations |
//!
//! ```
//! use qgtorsion::graph::MetricGraph;
//! use qgtorsion::torsion::torsional_rigidity;
//!
//! // Unit interval, strength 1 at one end and a Neumann end: T = 1/3 + 1.
//! let g = MetricGraph::interval(1.0, 1.0, 0.0);
//! let t = torsional_rigidity(&g).unwrap();
//! assert!((t - 4.0 / 3.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod calculus;
mod error;
pub mod fixtures;
pub mod graph;
pub mod numerics;
pub mod spectral;
pub mod surgery;
pub mod torsion;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, MetricGraph, Vertex, VertexCondition, VertexId};
