//! Exact computations with lattice configurations over the discrete valuation ring
//! F_p[t] localized at (t), the bound quivers and quiver representations they induce,
//! the stratification of the associated quiver Grassmannians, and the twist-graph
//! combinatorics of line bundles on totally rational nodal curves.
//!
//! All arithmetic is exact: scalars are rational functions in t over F_p, residue
//! computations happen over F_p. Every public value is immutable after construction,
//! so everything here is safe to share across threads.

pub mod curve;
pub mod lattice;
pub mod laurent;
pub mod linalg;
pub mod quiver;
pub mod rep;
pub mod strata;
pub mod tropical;

pub use curve::{RationalNodalCurve, SpecialFiberRep};
pub use lattice::{Lattice, LatticeClass, LatticeConfiguration};
pub use laurent::{LaurentMatrix, LaurentScalar};
pub use linalg::{FieldMatrix, Subspace};
pub use quiver::{Tree, WeightedQuiver};
pub use rep::{QuiverRep, SubRep};
pub use strata::DoubleTreeGeom;
pub use tropical::DualGraph;
