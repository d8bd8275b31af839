//! Lloyd's k-means with k-means++ seeding and best-of-restarts selection.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{squared_distance, DenseMatrix};

/// Iteration cap used by [`kmeans_best_of`].
pub const LLOYD_MAX_ITER: usize = 300;
/// Relative inertia change used by [`kmeans_best_of`].
pub const LLOYD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    /// Cluster index per row, each of `0..c` used at least once.
    pub labels: Vec<usize>,
    /// `c x m`.
    pub centers: DenseMatrix,
    /// `Σ_i ‖x_i − center(label_i)‖²`.
    pub inertia: f64,
    pub iterations: usize,
}

impl KMeansResult {
    pub fn clusters(&self) -> usize {
        self.centers.rows()
    }
}

/// k-means++ seeding: the first center is a uniformly chosen row, each
/// further one is drawn with probability proportional to the squared
/// distance to the nearest center chosen so far.
pub fn kmeanspp_init(x: &DenseMatrix, c: usize, seed: u64) -> Result<DenseMatrix> {
    let n = x.rows();
    if c == 0 || c > n {
        return Err(Error::param(format!("{c} clusters requested for {n} points")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(c);
    chosen.push(rng.random_range(0..n));
    let mut nearest: Vec<f64> = (0..n).map(|i| squared_distance(x.row(i), x.row(chosen[0]))).collect();
    while chosen.len() < c {
        let next = match WeightedIndex::new(&nearest) {
            Ok(dist) => dist.sample(&mut rng),
            // Every remaining row coincides with a chosen center.
            Err(_) => rng.random_range(0..n),
        };
        chosen.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(x.row(i), x.row(next)));
        }
    }
    Ok(DenseMatrix::from_fn(c, x.cols(), |r, j| x[(chosen[r], j)]))
}

/// Lloyd iterations from the given centers.
///
/// Stops when the assignment no longer changes, the relative inertia change
/// drops below `tol`, or after `max_iter` mean updates. Returned labels are
/// the nearest-center assignment for the returned centers.
pub fn lloyd(x: &DenseMatrix, centers: &DenseMatrix, max_iter: usize, tol: f64) -> Result<KMeansResult> {
    let (n, c) = (x.rows(), centers.rows());
    if centers.cols() != x.cols() {
        return Err(Error::dim(format!("centers have {} columns, data has {}", centers.cols(), x.cols())));
    }
    if c == 0 || c > n {
        return Err(Error::param(format!("{c} clusters requested for {n} points")));
    }
    let mut centers = centers.clone();
    let mut labels = assign(x, &mut centers);
    let mut inertia = inertia_of(x, &centers, &labels);
    let mut iterations = 0;
    while iterations < max_iter {
        centers = cluster_means(x, &labels, c);
        let next = assign(x, &mut centers);
        let next_inertia = inertia_of(x, &centers, &next);
        iterations += 1;
        debug_assert!(next_inertia <= inertia * (1.0 + 1e-12) + 1e-12, "inertia rose: {inertia} -> {next_inertia}");
        let unchanged = next == labels;
        let small = (inertia - next_inertia).abs() <= tol * inertia.max(f64::MIN_POSITIVE);
        labels = next;
        inertia = next_inertia;
        if unchanged || small {
            break;
        }
    }
    Ok(KMeansResult {
        labels,
        centers,
        inertia,
        iterations,
    })
}

/// Best of `restarts` seeded runs (seeds `seed, seed + 1, …`) by inertia,
/// earliest restart on ties.
pub fn kmeans_best_of(x: &DenseMatrix, c: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    if restarts == 0 {
        return Err(Error::param("restarts must be at least 1"));
    }
    let runs: Vec<KMeansResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let init = kmeanspp_init(x, c, seed.wrapping_add(r as u64))?;
            lloyd(x, &init, LLOYD_MAX_ITER, LLOYD_TOL)
        })
        .collect::<Result<_>>()?;
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.inertia.total_cmp(&b.1.inertia).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    Ok(runs.into_iter().nth(best).expect("index in range"))
}

/// Nearest center per row (lowest index on ties). Any cluster left empty
/// takes over the row farthest from its current center.
fn assign(x: &DenseMatrix, centers: &mut DenseMatrix) -> Vec<usize> {
    let c = centers.rows();
    let mut labels = Vec::with_capacity(x.rows());
    let mut dist = Vec::with_capacity(x.rows());
    for row in x.row_iter() {
        let (mut best, mut best_d) = (0, f64::INFINITY);
        for j in 0..c {
            let d = squared_distance(row, centers.row(j));
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        labels.push(best);
        dist.push(best_d);
    }
    let mut sizes = vec![0usize; c];
    for &l in &labels {
        sizes[l] += 1;
    }
    for empty in 0..c {
        if sizes[empty] > 0 {
            continue;
        }
        let far = (0..x.rows())
            .filter(|&i| sizes[labels[i]] > 1)
            .fold(None, |acc: Option<usize>, i| match acc {
                Some(b) if dist[b] >= dist[i] => Some(b),
                _ => Some(i),
            })
            .expect("c <= n leaves a cluster with two or more rows");
        sizes[labels[far]] -= 1;
        sizes[empty] = 1;
        labels[far] = empty;
        dist[far] = 0.0;
        centers.row_mut(empty).copy_from_slice(x.row(far));
    }
    labels
}

fn cluster_means(x: &DenseMatrix, labels: &[usize], c: usize) -> DenseMatrix {
    let mut sums = DenseMatrix::zeros(c, x.cols());
    let mut counts = vec![0usize; c];
    for (row, &l) in x.row_iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums.row_mut(l).iter_mut().zip(row) {
            *s += v;
        }
    }
    for (j, &m) in counts.iter().enumerate() {
        let inv = 1.0 / m as f64;
        sums.row_mut(j).iter_mut().for_each(|s| *s *= inv);
    }
    sums
}

pub fn inertia_of(x: &DenseMatrix, centers: &DenseMatrix, labels: &[usize]) -> f64 {
    x.row_iter().zip(labels).map(|(row, &l)| squared_distance(row, centers.row(l))).sum()
}
