//! Labeled synthetic datasets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::metrics::ClusterAssignment;
use crate::numerics::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    /// Isotropic Gaussian blobs.
    Blobs,
    /// Two interleaving half circles (2-D).
    Moons,
    /// Tight groups far apart, so the k-NN graph splits into one component
    /// per group.
    Components,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub n: usize,
    /// Ignored for moons.
    pub dim: usize,
    /// Ignored for moons (always 2).
    pub clusters: usize,
    /// Blob standard deviation, or moon noise.
    pub noise: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn generate(&self) -> Result<Dataset> {
        match self.kind {
            SynthKind::Blobs => blobs(self.n, self.dim, self.clusters, self.noise, self.seed),
            SynthKind::Moons => two_moons(self.n, self.noise, self.seed),
            SynthKind::Components => components(self.n, self.dim, self.clusters, self.seed),
        }
    }
}

fn sizes(n: usize, c: usize) -> Vec<usize> {
    (0..c).map(|j| n / c + usize::from(j < n % c)).collect()
}

fn check(n: usize, d: usize, c: usize) -> Result<()> {
    if c == 0 || n < c || d == 0 {
        return Err(Error::param(format!("cannot generate {c} clusters of {n} points in {d} dimensions")));
    }
    Ok(())
}

/// Centers uniform in `[-10, 10]^d`, points `center + std · N(0, I)`,
/// cluster sizes as even as possible.
pub fn blobs(n: usize, d: usize, c: usize, std: f64, seed: u64) -> Result<Dataset> {
    check(n, d, c)?;
    if !(std >= 0.0) {
        return Err(Error::param(format!("blob std must be nonnegative, got {std}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = DenseMatrix::from_fn(c, d, |_, _| rng.random_range(-10.0..10.0));
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (j, size) in sizes(n, c).into_iter().enumerate() {
        for _ in 0..size {
            for &m in centers.row(j) {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(m + std * z);
            }
            labels.push(j);
        }
    }
    let x = DenseMatrix::from_row_major(n, d, data)?;
    Dataset::new(x, Some(ClusterAssignment::new(labels, c)?), "blobs")
}

/// Upper half circle of radius 1 at the origin (label 0) and the lower half
/// circle shifted to `(1, 0.5)` (label 1), angles evenly spaced, plus
/// Gaussian noise.
pub fn two_moons(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    check(n, 2, 2)?;
    let normal = Normal::new(0.0, noise).map_err(|e| Error::param(format!("moon noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_out = n / 2;
    let n_in = n - n_out;
    let angle = |i: usize, m: usize| if m > 1 { PI * i as f64 / (m - 1) as f64 } else { 0.0 };
    let mut data = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n_out {
        let t = angle(i, n_out);
        data.extend([t.cos(), t.sin()]);
        labels.push(0);
    }
    for i in 0..n_in {
        let t = angle(i, n_in);
        data.extend([1.0 - t.cos(), 0.5 - t.sin()]);
        labels.push(1);
    }
    data.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
    let x = DenseMatrix::from_row_major(n, 2, data)?;
    Dataset::new(x, Some(ClusterAssignment::new(labels, 2)?), "moons")
}

/// Group `j` is uniform in the unit cube shifted by `100 j` along every
/// axis.
pub fn components(n: usize, d: usize, c: usize, seed: u64) -> Result<Dataset> {
    check(n, d, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (j, size) in sizes(n, c).into_iter().enumerate() {
        for _ in 0..size {
            for _ in 0..d {
                data.push(100.0 * j as f64 + rng.random::<f64>());
            }
            labels.push(j);
        }
    }
    let x = DenseMatrix::from_row_major(n, d, data)?;
    Dataset::new(x, Some(ClusterAssignment::new(labels, c)?), "components")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_labels() {
        let b = blobs(10, 3, 3, 1.0, 0).unwrap();
        assert_eq!(b.x.shape(), (10, 3));
        assert_eq!(b.labels.unwrap().labels, vec![0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
        let m = two_moons(7, 0.0, 0).unwrap();
        assert_eq!(m.x.row(0), [1.0, 0.0]);
        assert_eq!(m.labels.unwrap().labels.iter().filter(|&&l| l == 1).count(), 4);
        assert!(components(2, 1, 3, 0).is_err());
    }

    #[test]
    fn seeded() {
        let a = blobs(20, 2, 2, 0.5, 9).unwrap();
        let b = blobs(20, 2, 2, 0.5, 9).unwrap();
        assert_eq!(a.x, b.x);
    }
}
