//! Spectral embedding and the similarity graph built on it.

use crate::error::{Error, Result};
use crate::graph::{self, AffinityGraph, LaplacianSet};
use crate::numerics::{sym_eigs_smallest, DenseMatrix};

/// Bottom `c` eigenvectors of the normalized Laplacian.
///
/// Rows are used as-is (no unit-length row normalization).
#[derive(Clone, Debug)]
pub struct SpectralEmbedding {
    /// `n x c`, orthonormal columns.
    pub vectors: DenseMatrix,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
}

impl SpectralEmbedding {
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }
}

pub fn spectral_embed(lset: &LaplacianSet, c: usize, tol: f64) -> Result<SpectralEmbedding> {
    let n = lset.normalized.n();
    if c == 0 || c > n {
        return Err(Error::param(format!("embedding dimension {c} must be in 1..={n}")));
    }
    let eig = sym_eigs_smallest(&lset.normalized, c, tol)?;
    Ok(SpectralEmbedding {
        vectors: eig.eigenvectors,
        eigenvalues: eig.eigenvalues,
    })
}

/// k-NN Gaussian similarity on the embedding rows, with the bandwidth
/// re-estimated in embedding space.
pub fn embedding_similarity(embedding: &SpectralEmbedding, k: usize) -> Result<AffinityGraph> {
    similarity_on_rows(&embedding.vectors, k)
}

/// Same as [`embedding_similarity`] for an arbitrary row matrix.
pub fn similarity_on_rows(rows: &DenseMatrix, k: usize) -> Result<AffinityGraph> {
    let (graph, _) = graph::auto_affinity(rows, k)?;
    Ok(graph)
}
