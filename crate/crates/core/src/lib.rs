//! Spectral shrunk clustering.
//!
//! The pipeline builds a k-nearest-neighbour Gaussian affinity graph on the
//! data, embeds it with the bottom eigenvectors of the normalized Laplacian,
//! then *shrinks* the embedding: it solves
//!
//! ```text
//! min_G  ‖G − F‖₂,₁ + γ Σ_{i<j} W_ij ‖g_i − g_j‖₂
//! ```
//!
//! where `F` is the spectral embedding and `W` a k-NN similarity graph built
//! on the rows of `F`. The problem is convex and is solved by iterative
//! reweighting, each step a sparse SPD solve. K-means on the shrunk rows
//! gives the final clustering.
//!
//! Modules, bottom-up:
//!
//! - [`numerics`]: dense/sparse matrices, eigensolver, SPD solver
//! - [`graph`]: k-NN search, bandwidth estimate, affinity and Laplacians
//! - [`embedding`]: spectral embedding and embedding-space similarity
//! - [`shrink`]: objective, reweighting and the iterative shrink solver
//! - [`kmeans`]: k-means++ seeding, Lloyd iterations, best-of restarts
//! - [`metrics`]: contingency tables, Hungarian assignment, ACC and NMI
//! - [`baselines`]: PCA and the end-to-end pipelines
//! - [`cli`]: datasets, synthetic data, experiment runs and report export
//!
//! See the crate's `examples/` directory for one runnable program per
//! capability.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod cli;
pub mod embedding;
mod error;
pub mod graph;
pub mod kmeans;
pub mod metrics;
pub mod numerics;
pub mod shrink;

pub use error::{Error, Result};
