//! PCA and the end-to-end clustering pipelines: k-means on raw data,
//! spectral clustering, their PCA-reduced variants, and shrunk spectral
//! clustering.

use crate::embedding::{embedding_similarity, spectral_embed, SpectralEmbedding};
use crate::error::{Error, Result};
use crate::graph::{auto_affinity, laplacians};
use crate::kmeans::{kmeans_best_of, KMeansResult};
use crate::metrics::ClusterAssignment;
use crate::numerics::{sym_eigs_smallest, DenseMatrix, SparseSymMatrix};
use crate::shrink::{ssc_solve, ShrinkConfig, ShrunkPatterns};

/// Eigen-residual tolerance used by every pipeline.
pub const EIGEN_TOL: f64 = 1e-10;

/// Projection dimensions tried by the PCA pipelines.
pub const PCA_DIMENSIONS: [usize; 5] = [10, 25, 50, 100, 150];

#[derive(Clone, Debug)]
pub struct PcaProjection {
    pub mean: Vec<f64>,
    /// `d x m`, orthonormal columns, leading direction first.
    pub components: DenseMatrix,
    /// Sample variance along each component (divisor `n − 1`), descending.
    pub variances: Vec<f64>,
    /// `(X − mean) · components`, `n x m`.
    pub projected: DenseMatrix,
}

impl PcaProjection {
    pub fn captured_variance(&self) -> f64 {
        self.variances.iter().sum()
    }

    /// `projected · componentsᵀ + mean`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let z = self.projected.matmul(&self.components.transpose()).expect("shapes agree");
        DenseMatrix::from_fn(z.rows(), z.cols(), |i, j| z[(i, j)] + self.mean[j])
    }
}

pub fn pca(x: &DenseMatrix, m: usize) -> Result<PcaProjection> {
    let (n, d) = x.shape();
    if m == 0 || m > n.min(d) {
        return Err(Error::param(format!("PCA dimension {m} must be in 1..={}", n.min(d))));
    }
    let mut mean = vec![0.0; d];
    for row in x.row_iter() {
        for (s, v) in mean.iter_mut().zip(row) {
            *s += v;
        }
    }
    mean.iter_mut().for_each(|s| *s /= n as f64);
    let centered = DenseMatrix::from_fn(n, d, |i, j| x[(i, j)] - mean[j]);
    let scale = -1.0 / (n.max(2) - 1) as f64;
    let neg_cov = centered.t_matmul(&centered)?.scaled(scale);
    let eig = sym_eigs_smallest(&SparseSymMatrix::from_dense_upper(&neg_cov, 0.0)?, m, EIGEN_TOL)?;
    let components = eig.eigenvectors;
    Ok(PcaProjection {
        projected: centered.matmul(&components)?,
        variances: eig.eigenvalues.iter().map(|l| -l).collect(),
        components,
        mean,
    })
}

/// [`PCA_DIMENSIONS`] clipped to `min(n, d)`, keeping the clip value itself
/// when the grid overshoots.
pub fn pca_grid(n: usize, d: usize) -> Vec<usize> {
    let cap = n.min(d);
    let mut grid: Vec<usize> = PCA_DIMENSIONS.iter().map(|&m| m.min(cap)).collect();
    grid.dedup();
    grid
}

/// Bottom-`c` normalized-Laplacian embedding of the k-NN graph on `x`.
pub fn spectral_embedding_of(x: &DenseMatrix, c: usize, k: usize) -> Result<SpectralEmbedding> {
    let (graph, _) = auto_affinity(x, k)?;
    spectral_embed(&laplacians(&graph), c, EIGEN_TOL)
}

pub fn fit_kmeans(x: &DenseMatrix, c: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_best_of(x, c, restarts, seed)
}

pub fn cluster_kmeans(x: &DenseMatrix, c: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    Ok((&fit_kmeans(x, c, restarts, seed)?).into())
}

pub fn fit_spectral(x: &DenseMatrix, c: usize, k: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let emb = spectral_embedding_of(x, c, k)?;
    kmeans_best_of(&emb.vectors, c, restarts, seed)
}

pub fn cluster_spectral(x: &DenseMatrix, c: usize, k: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    Ok((&fit_spectral(x, c, k, restarts, seed)?).into())
}

/// Embedding, similarity on the embedding, shrink, then k-means on the
/// shrunk rows.
pub fn fit_ssc(
    x: &DenseMatrix,
    c: usize,
    k: usize,
    cfg: &ShrinkConfig,
    restarts: usize,
    seed: u64,
) -> Result<(KMeansResult, ShrunkPatterns)> {
    let emb = spectral_embedding_of(x, c, k)?;
    let w = embedding_similarity(&emb, k)?;
    let shrunk = ssc_solve(&emb.vectors, &w, cfg)?;
    let km = kmeans_best_of(&shrunk.patterns, c, restarts, seed)?;
    Ok((km, shrunk))
}

pub fn cluster_ssc(
    x: &DenseMatrix,
    c: usize,
    k: usize,
    cfg: &ShrinkConfig,
    restarts: usize,
    seed: u64,
) -> Result<(ClusterAssignment, ShrunkPatterns)> {
    let (km, shrunk) = fit_ssc(x, c, k, cfg, restarts, seed)?;
    Ok(((&km).into(), shrunk))
}

pub fn fit_pca_kmeans(x: &DenseMatrix, c: usize, m: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_best_of(&pca(x, m)?.projected, c, restarts, seed)
}

pub fn fit_pca_spectral(
    x: &DenseMatrix,
    c: usize,
    m: usize,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<KMeansResult> {
    fit_spectral(&pca(x, m)?.projected, c, k, restarts, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_data() {
        let x = DenseMatrix::from_fn(6, 3, |i, j| (i as f64 - 1.0) * [1.0, 2.0, -2.0][j]);
        let p = pca(&x, 1).unwrap();
        assert!(p.reconstruct().sub(&x).unwrap().max_abs() < 1e-10);
        let along: Vec<f64> = (0..6).map(|i| (i as f64 - 2.5) * 3.0).collect();
        let sign = p.projected[(0, 0)].signum() * along[0].signum();
        for i in 0..6 {
            assert!((p.projected[(i, 0)] - sign * along[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn full_rank_reconstructs() {
        let x = DenseMatrix::from_fn(5, 3, |i, j| ((i * 7 + j * 5) % 4) as f64 + 0.1 * j as f64);
        let p = pca(&x, 3).unwrap();
        assert!(p.reconstruct().sub(&x).unwrap().max_abs() < 1e-8);
        let gram = p.components.t_matmul(&p.components).unwrap();
        assert!(gram.sub(&DenseMatrix::identity(3)).unwrap().max_abs() < 1e-8);
        assert!(pca(&x, 4).is_err());
        assert!(pca(&x, 0).is_err());
    }

    #[test]
    fn grid_clipping() {
        assert_eq!(pca_grid(1000, 256), vec![10, 25, 50, 100, 150]);
        assert_eq!(pca_grid(300, 40), vec![10, 25, 40]);
        assert_eq!(pca_grid(5, 3), vec![3]);
    }

    #[test]
    fn single_cluster_kmeans() {
        let x = DenseMatrix::from_fn(7, 2, |i, j| (i * j) as f64);
        assert_eq!(cluster_kmeans(&x, 1, 3, 0).unwrap().labels, vec![0; 7]);
    }
}
