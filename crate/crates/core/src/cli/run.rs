use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::baselines::{self, pca_grid};
use crate::error::{Error, Result};
use crate::kmeans::{KMeansResult, LLOYD_MAX_ITER};
use crate::metrics::{acc, nmi, ClusterAssignment};
use crate::shrink::{ShrinkConfig, TracePoint};

/// γ values tried by [`run_sweep`] when none are given.
pub const DEFAULT_GAMMAS: [f64; 5] = [1e-6, 1e-3, 1.0, 1e3, 1e6];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Shrunk spectral clustering.
    Ssc,
    /// Spectral clustering.
    Sc,
    Kmeans,
    PcaKmeans,
    PcaSc,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Kmeans, Method::Sc, Method::PcaKmeans, Method::PcaSc, Method::Ssc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ssc => "ssc",
            Method::Sc => "sc",
            Method::Kmeans => "kmeans",
            Method::PcaKmeans => "pca-kmeans",
            Method::PcaSc => "pca-sc",
        }
    }

    fn uses_pca(self) -> bool {
        matches!(self, Method::PcaKmeans | Method::PcaSc)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pipeline parameters. `clusters` falls back to the number of ground-truth
/// classes; `pca_dim` to the smallest PCA grid dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub clusters: Option<usize>,
    pub k: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub pca_dim: Option<usize>,
}

impl Default for RunParams {
    fn default() -> Self {
        let shrink = ShrinkConfig::default();
        RunParams {
            clusters: None,
            k: 5,
            gamma: shrink.gamma,
            epsilon: shrink.epsilon,
            tol: shrink.tol,
            max_iter: shrink.max_iter,
            restarts: 50,
            pca_dim: None,
        }
    }
}

impl RunParams {
    pub fn shrink_config(&self) -> ShrinkConfig {
        ShrinkConfig {
            gamma: self.gamma,
            epsilon: self.epsilon,
            tol: self.tol,
            max_iter: self.max_iter,
            ..ShrinkConfig::default()
        }
    }

    /// Fills in `clusters` and `pca_dim` for this dataset and method.
    fn resolve(&self, ds: &Dataset, method: Method) -> Result<RunParams> {
        let clusters = match (self.clusters, &ds.labels) {
            (Some(c), _) => c,
            (None, Some(l)) => l.c,
            (None, None) => return Err(Error::param("number of clusters is required when no labels are given")),
        };
        let pca_dim = if method.uses_pca() {
            Some(match self.pca_dim {
                Some(m) => m,
                None => pca_grid(ds.n(), ds.dim())[0],
            })
        } else {
            None
        };
        Ok(RunParams {
            clusters: Some(clusters),
            pca_dim,
            ..*self
        })
    }
}

/// One pipeline run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub dataset: String,
    pub params: RunParams,
    /// Present iff ground truth was available.
    pub acc: Option<f64>,
    pub nmi: Option<f64>,
    /// k-means inertia of the final clustering.
    pub inertia: f64,
    /// Shrink iterations for `ssc`, Lloyd iterations otherwise.
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
    pub labels: Vec<usize>,
    /// Objective per shrink iteration (`ssc` only).
    pub trace: Option<Vec<TracePoint>>,
    /// Seconds.
    pub wall_time: f64,
}

pub fn run_cluster(ds: &Dataset, method: Method, params: &RunParams, seed: u64) -> Result<RunReport> {
    let start = Instant::now();
    let p = params.resolve(ds, method)?;
    let c = p.clusters.expect("resolved");
    let x = &ds.x;
    let (converged, iterations, km, trace) = match method {
        Method::Kmeans => plain(baselines::fit_kmeans(x, c, p.restarts, seed)?),
        Method::Sc => plain(baselines::fit_spectral(x, c, p.k, p.restarts, seed)?),
        Method::PcaKmeans => {
            let m = p.pca_dim.expect("resolved");
            plain(baselines::fit_pca_kmeans(x, c, m, p.restarts, seed)?)
        }
        Method::PcaSc => {
            let m = p.pca_dim.expect("resolved");
            plain(baselines::fit_pca_spectral(x, c, m, p.k, p.restarts, seed)?)
        }
        Method::Ssc => {
            let (km, shrunk) = baselines::fit_ssc(x, c, p.k, &p.shrink_config(), p.restarts, seed)?;
            check_trace(&shrunk.trace)?;
            (shrunk.converged, shrunk.iterations, km, Some(shrunk.trace))
        }
    };
    let pred = ClusterAssignment::from(&km);
    let (acc, nmi) = match &ds.labels {
        Some(truth) => (Some(acc(&pred, truth)?), Some(nmi(&pred, truth)?)),
        None => (None, None),
    };
    Ok(RunReport {
        method,
        dataset: ds.name.clone(),
        params: p,
        acc,
        nmi,
        inertia: km.inertia,
        iterations,
        converged,
        seed,
        labels: pred.labels,
        trace,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

type Outcome = (bool, usize, KMeansResult, Option<Vec<TracePoint>>);

fn plain(km: KMeansResult) -> Outcome {
    (km.iterations < LLOYD_MAX_ITER, km.iterations, km, None)
}

/// The objective the shrink iteration minimizes must not increase.
fn check_trace(trace: &[TracePoint]) -> Result<()> {
    for (t, w) in trace.windows(2).enumerate() {
        if w[1].smoothed > w[0].smoothed * (1.0 + 1e-10) {
            return Err(Error::Numerical {
                index: t + 1,
                reason: format!("shrink objective rose from {:e} to {:e}", w[0].smoothed, w[1].smoothed),
            });
        }
    }
    Ok(())
}

/// `ssc` at every γ of the grid with a fixed seed, reports in grid order.
pub fn run_sweep(ds: &Dataset, params: &RunParams, gammas: &[f64], seed: u64) -> Result<Vec<RunReport>> {
    if gammas.is_empty() {
        return Err(Error::param("γ grid is empty"));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
        return Err(Error::param(format!("γ must be positive, got {g}")));
    }
    gammas
        .par_iter()
        .map(|&gamma| run_cluster(ds, Method::Ssc, &RunParams { gamma, ..*params }, seed))
        .collect()
}

/// `(γ, ACC, NMI)` rows of a sweep.
pub fn sensitivity_table(reports: &[RunReport]) -> Vec<(f64, Option<f64>, Option<f64>)> {
    reports.iter().map(|r| (r.params.gamma, r.acc, r.nmi)).collect()
}

/// Repeated runs of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub params: RunParams,
    pub acc_mean: Option<f64>,
    pub acc_std: Option<f64>,
    pub nmi_mean: Option<f64>,
    pub nmi_std: Option<f64>,
    pub inertia_mean: f64,
    pub runs: Vec<RunReport>,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Every method side by side. PCA methods are expanded over the PCA grid
/// and `ssc` over `gammas`; each configuration runs `repeats` times with
/// seeds `seed, seed + 1, …`.
pub fn run_bench(
    ds: &Dataset,
    methods: &[Method],
    params: &RunParams,
    gammas: &[f64],
    repeats: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        return Err(Error::param("repeats must be at least 1"));
    }
    let mut configs = Vec::new();
    for &method in methods {
        match method {
            Method::PcaKmeans | Method::PcaSc if params.pca_dim.is_none() => {
                for m in pca_grid(ds.n(), ds.dim()) {
                    configs.push((method, RunParams { pca_dim: Some(m), ..*params }));
                }
            }
            Method::Ssc => {
                for &gamma in gammas {
                    if !(gamma > 0.0 && gamma.is_finite()) {
                        return Err(Error::param(format!("γ must be positive, got {gamma}")));
                    }
                    configs.push((method, RunParams { gamma, ..*params }));
                }
            }
            _ => configs.push((method, *params)),
        }
    }
    let jobs: Vec<(usize, u64)> = (0..configs.len())
        .flat_map(|ci| (0..repeats as u64).map(move |r| (ci, seed.wrapping_add(r))))
        .collect();
    let reports: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(ci, s)| run_cluster(ds, configs[ci].0, &configs[ci].1, s))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(configs.len());
    for (ci, runs) in reports.chunks(repeats).enumerate() {
        let stat = |get: fn(&RunReport) -> Option<f64>| -> (Option<f64>, Option<f64>) {
            let v: Option<Vec<f64>> = runs.iter().map(get).collect();
            v.map(|v| mean_std(&v)).map_or((None, None), |(m, s)| (Some(m), Some(s)))
        };
        let (acc_mean, acc_std) = stat(|r| r.acc);
        let (nmi_mean, nmi_std) = stat(|r| r.nmi);
        let inertia: Vec<f64> = runs.iter().map(|r| r.inertia).collect();
        rows.push(BenchRow {
            method: configs[ci].0,
            params: runs[0].params,
            acc_mean,
            acc_std,
            nmi_mean,
            nmi_std,
            inertia_mean: mean_std(&inertia).0,
            runs: runs.to_vec(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::synth::blobs;

    #[test]
    fn mean_std_values() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
    }

    #[test]
    fn clusters_required_without_labels() {
        let mut ds = blobs(12, 2, 2, 0.1, 0).unwrap();
        ds.labels = None;
        let err = run_cluster(&ds, Method::Kmeans, &RunParams::default(), 0).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn sweep_rejects_nonpositive_gamma() {
        let ds = blobs(12, 2, 2, 0.1, 0).unwrap();
        assert!(run_sweep(&ds, &RunParams::default(), &[1.0, 0.0], 0).is_err());
        assert!(run_sweep(&ds, &RunParams::default(), &[], 0).is_err());
    }

    #[test]
    fn kmeans_on_blobs() {
        let ds = blobs(40, 2, 2, 0.2, 3).unwrap();
        let r = run_cluster(&ds, Method::Kmeans, &RunParams { restarts: 5, ..Default::default() }, 1).unwrap();
        assert_eq!(r.acc, Some(1.0));
        assert!(r.trace.is_none());
        assert_eq!(r.params.clusters, Some(2));
    }
}
