//! Linear-algebra substrate: dense and sparse symmetric matrices, a
//! smallest-eigenpair solver and an SPD linear solver.

mod dense;
pub mod eigen;
mod solve;
mod sparse;

pub use dense::DenseMatrix;
pub(crate) use dense::{distance, norm2, squared_distance};
pub use eigen::{dense_symmetric_eigen, lanczos_smallest, sym_eigs_smallest, EigenResult};
pub use solve::{cholesky_solve, conjugate_gradient, residual_norm, spd_solve, spd_solve_with, CholeskyFactor};
pub use sparse::SparseSymMatrix;
