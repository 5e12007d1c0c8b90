//! Linear algebra kernels: dense symmetric matrices and their spectra, sparse
//! assembly, envelope Cholesky, conjugate gradients and bandwidth reduction.

mod cg;
mod dense;
mod ordering;
mod skyline;
mod sparse;
mod union_find;

pub use cg::{conjugate_gradient, CgOutcome};
pub use dense::{DenseMatrix, SymmetricEigen};
pub use ordering::reverse_cuthill_mckee;
pub use skyline::SkylineCholesky;
pub use sparse::{CsrMatrix, TripletBuilder};
pub use union_find::UnionFind;
