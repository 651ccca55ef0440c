//! Exact-arithmetic toolkit for multivariate Euler products: sparse integer
//! series, cyclotomic factorization and natural-boundary descriptors, Newton
//! polyhedra and their duals, unitary presentations of lattice-point
//! generating functions, brute-force counting oracles, and group-zeta
//! utilities.

pub mod counting;
pub mod euler;
pub mod groupzeta;
pub mod lp;
pub mod polyhedra;
pub mod series;
pub mod toric;

pub use euler::{
    BoundaryDescriptor, BoundaryVariant, CyclotomicFactorization, CyclotomicVerdict,
    EulerError, ZetaFactor,
};
pub use polyhedra::{ConeTest, DualPolyhedron, PointSet, PolyError, Vertex};
pub use series::{ExponentVector, Int, Rat, SeriesError, SparseSeries};
pub use toric::{
    AnData, AnalyticData, Presentation, ToricError, ToricMatrix, VertexRecord,
};
