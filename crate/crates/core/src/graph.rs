//! k-nearest-neighbour affinity graphs and their Laplacians.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{distance, squared_distance, DenseMatrix, SparseSymMatrix};

/// Symmetric Gaussian-weighted k-NN graph.
///
/// An edge `(i, j)` exists when either endpoint lists the other among its
/// `k` nearest neighbours. Weights are `exp(−‖x_i − x_j‖² / δ²)` and the
/// diagonal is empty.
#[derive(Clone, Debug)]
pub struct AffinityGraph {
    pub weights: SparseSymMatrix,
    pub k: usize,
    pub delta: f64,
}

impl AffinityGraph {
    pub fn n(&self) -> usize {
        self.weights.n()
    }

    /// Off-diagonal edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.triplets().filter(|&(i, j, _)| i != j)
    }
}

/// Degree vector, `L = D − A` and `L_n = I − D^{-1/2} A D^{-1/2}`.
#[derive(Clone, Debug)]
pub struct LaplacianSet {
    pub degree: Vec<f64>,
    pub laplacian: SparseSymMatrix,
    pub normalized: SparseSymMatrix,
}

/// Bandwidth estimate and whether the degenerate fallback was used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bandwidth {
    pub delta: f64,
    pub fallback: bool,
}

/// Indices of the `k` nearest rows for every row of `x`, nearest first,
/// distance ties broken by the lower index.
pub fn knn_indices(x: &DenseMatrix, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = x.rows();
    if k == 0 || k >= n {
        return Err(Error::param(format!("k = {k} neighbours needs 1 <= k < n = {n}")));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let xi = x.row(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (squared_distance(xi, x.row(j)), j))
                .collect();
            let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            cand.select_nth_unstable_by(k - 1, by_dist);
            cand.truncate(k);
            cand.sort_unstable_by(by_dist);
            cand.into_iter().map(|(_, j)| j).collect()
        })
        .collect())
}

/// Mean distance from each point to its last (k-th) listed neighbour.
/// Falls back to `δ = 1` when that mean is zero, i.e. every point has `k`
/// exact duplicates.
pub fn estimate_delta(x: &DenseMatrix, neighbors: &[Vec<usize>]) -> Result<Bandwidth> {
    if neighbors.is_empty() || neighbors.iter().any(|nb| nb.is_empty()) {
        return Err(Error::param("neighbour lists must be nonempty"));
    }
    let total: f64 = neighbors
        .iter()
        .enumerate()
        .map(|(i, nb)| distance(x.row(i), x.row(*nb.last().expect("nonempty"))))
        .sum();
    let delta = total / neighbors.len() as f64;
    if delta > 0.0 && delta.is_finite() {
        Ok(Bandwidth {
            delta,
            fallback: false,
        })
    } else {
        Ok(Bandwidth {
            delta: 1.0,
            fallback: true,
        })
    }
}

/// Gaussian k-NN affinity with union symmetrization.
pub fn build_affinity(x: &DenseMatrix, k: usize, delta: f64) -> Result<AffinityGraph> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param(format!("bandwidth must be positive, got {delta}")));
    }
    let neighbors = knn_indices(x, k)?;
    affinity_from_neighbors(x, &neighbors, k, delta)
}

/// Affinity on precomputed neighbour lists.
pub fn affinity_from_neighbors(x: &DenseMatrix, neighbors: &[Vec<usize>], k: usize, delta: f64) -> Result<AffinityGraph> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param(format!("bandwidth must be positive, got {delta}")));
    }
    let n = x.rows();
    if neighbors.len() != n {
        return Err(Error::dim(format!("{} neighbour lists for {n} points", neighbors.len())));
    }
    let mut pairs: Vec<(usize, usize)> = neighbors
        .iter()
        .enumerate()
        .flat_map(|(i, nb)| nb.iter().map(move |&j| if i < j { (i, j) } else { (j, i) }))
        .filter(|(i, j)| i != j)
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let inv = 1.0 / (delta * delta);
    let trips = pairs.into_iter().map(|(i, j)| {
        let w = (-squared_distance(x.row(i), x.row(j)) * inv).exp();
        // Far pairs would underflow to zero and silently drop the edge.
        (i, j, w.max(f64::MIN_POSITIVE))
    });
    Ok(AffinityGraph {
        weights: SparseSymMatrix::from_triplets(n, trips)?,
        k,
        delta,
    })
}

/// k-NN search, bandwidth estimate and affinity in one call.
pub fn auto_affinity(x: &DenseMatrix, k: usize) -> Result<(AffinityGraph, Bandwidth)> {
    let neighbors = knn_indices(x, k)?;
    let bw = estimate_delta(x, &neighbors)?;
    let graph = affinity_from_neighbors(x, &neighbors, k, bw.delta)?;
    Ok((graph, bw))
}

pub fn laplacians(graph: &AffinityGraph) -> LaplacianSet {
    let a = &graph.weights;
    let n = a.n();
    let degree = a.row_sums();
    let inv_sqrt: Vec<f64> = degree
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();

    let mut lap = Vec::with_capacity(a.nnz() / 2 + n);
    let mut norm = Vec::with_capacity(a.nnz() / 2 + n);
    for i in 0..n {
        lap.push((i, i, degree[i]));
        norm.push((i, i, 1.0));
    }
    for (i, j, w) in graph.edges() {
        lap.push((i, j, -w));
        norm.push((i, j, -w * inv_sqrt[i] * inv_sqrt[j]));
    }
    LaplacianSet {
        degree,
        laplacian: SparseSymMatrix::from_triplets(n, lap).expect("valid by construction"),
        normalized: SparseSymMatrix::from_triplets(n, norm).expect("valid by construction"),
    }
}

/// Connected components of the graph's edge set, labelled in order of first
/// appearance.
pub fn connected_components(graph: &AffinityGraph) -> (usize, Vec<usize>) {
    let n = graph.n();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for (v, _) in graph.weights.row(u) {
                if label[v] == usize::MAX {
                    label[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    (count, label)
}
