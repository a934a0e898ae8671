//! Operator-matrix semigroups for initial-boundary value problems with
//! inhomogeneous and dynamic boundary conditions, in finite dimensions.
//!
//! A problem is described by a [`MaximalTriple`]: the maximal operator `A`,
//! the trace `L` and an optional feedback `B`, all acting on a coordinate
//! space for the domain of `A`. From it the crate builds the restriction `A₀`
//! to `ker L`, Dirichlet operators `D_λ`, block generators on the product
//! space `X × ∂X`, and the closed-form semigroup and resolvent of the coupled
//! system. The [`verify`] module holds independent oracles (RK4, exact heat
//! series, dense inverses) used to check every identity.

pub mod error;
pub mod exec;
pub mod models;
pub mod numerics;
pub mod semigroup;
pub mod triple;
pub mod verify;

pub use models::{build_diffusion_transport, build_heat_1d, DTParams, GridSpec};
pub use semigroup::{BoundarySignal, Trajectory};
pub use triple::{BlockGenerator, BlockMatrix, DirichletOperator, MaximalTriple};

pub use error::{Error, Result};

pub use numerics::{DenseMatrix, Scalar, Vector};
