//! Solve the graph Laplace equation `div(grad u) = f` on a connected directed
//! graph by splitting it into a first-order system.
//!
//! The pipeline is:
//!
//! 1. build a spanning tree and route `f` along it to get a feasible flow `A_f`
//!    with `div A_f = f` ([`tree::feasible_flow`]);
//! 2. drive the flow energy `||A||^2` down with cycle updates over the
//!    fundamental cycles of the tree, sampled with probability proportional to
//!    their squared length ([`solver::solve`]);
//! 3. read the potentials back off the tree ([`solver::extract_potentials`]).
//!
//! The duality gap `sum_e (A, C_e)^2` certifies the remaining energy error and
//! doubles as the stopping criterion. The [`analysis`] module holds dense
//! oracles used to check the sparse path.
//!
//! ```
//! use cyclelap::{Graph, VertexFunction, solver::{solve, SolverConfig}};
//!
//! let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
//! let f = VertexFunction::new(vec![-3.0, 0.0, 3.0]);
//! let result = solve(&g, &f, &SolverConfig::default()).unwrap();
//! assert!((result.potentials[0] + 1.0).abs() < 1e-12);
//! assert!((result.potentials[2] - 1.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod error;
pub mod graph;
pub mod operators;
pub mod solver;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{inner_product, EdgeFunction, Graph, VertexFunction};
pub use operators::Cycle;
pub use tree::{SpanningTree, TreeBasis, TreeStrategy};

/// Default relative tolerance: `|x - y| <= tol * max(1, |x|, |y|)`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative comparison used throughout the crate.
pub fn approx_eq(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * 1f64.max(x.abs()).max(y.abs())
}
