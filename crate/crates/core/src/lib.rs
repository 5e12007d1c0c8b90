//! Electrical impedance tomography in two dimensions with perfectly insulating
//! and perfectly conducting inclusions.
//!
//! The crate provides a P1 finite element forward solver for the conductivity
//! equation with extreme inclusions, discrete Neumann-to-Dirichlet (ND) maps,
//! closed-form reference solutions on the unit disk, and the semidefiniteness
//! tests that reconstruct inclusions by monotonicity.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod monotonicity;
pub mod oracle;
pub mod quadrature;
pub mod scalar;

pub use error::{EitError, Result};
pub use scalar::Real;

pub type Mesh64 = mesh::Mesh<f64>;
pub type RegionSpec64 = mesh::RegionSpec<f64>;
pub type BoundaryBasis64 = mesh::BoundaryBasis<f64>;
pub type ConductivityField64 = fem::ConductivityField<f64>;
pub type Potential64 = fem::Potential<f64>;
pub type NdMap64 = fem::NdMap<f64>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type ReconstructionResult64 = monotonicity::ReconstructionResult<f64>;

pub type Mesh32 = mesh::Mesh<f32>;
pub type ConductivityField32 = fem::ConductivityField<f32>;
pub type NdMap32 = fem::NdMap<f32>;
