//! Pattern shrinking on a spectral embedding.
//!
//! Given an embedding `F` (`n x c`) and a similarity graph `W` on its rows,
//! the shrunk patterns `G` minimize
//!
//! ```text
//! J(G) = Σ_i ‖g_i − f_i‖₂ + γ Σ_{i<j} W_ij ‖g_i − g_j‖₂
//! ```
//!
//! The first term is the row-wise ℓ2,1 norm of `G − F`, the second a graph
//! total variation pulling neighbours together. Both are nonsmooth, so the
//! solver minimizes a surrogate in which every norm `r` is replaced by the
//! Huber function `φ_ε(r)` (`r` for `r ≥ ε`, `r²/2ε + ε/2` below). Each
//! iteration majorizes `φ_ε` by a quadratic at the current iterate:
//!
//! ```text
//! S_ii  = 1 / (2 max(‖g_i − f_i‖, ε))
//! W̃_ij = W_ij / (2 max(‖g_i − g_j‖, ε)),   L̃ = D̃ − W̃
//! G⁺    = (S + γ L̃)⁻¹ S F
//! ```
//!
//! which is a majorize-minimize step, so the smoothed objective never
//! increases. At `ε = 0` the smoothed and exact objectives coincide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AffinityGraph;
use crate::numerics::{distance, norm2, spd_solve_with, DenseMatrix, SparseSymMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkConfig {
    /// Weight of the graph term.
    pub gamma: f64,
    /// Floor applied to every norm before it is inverted.
    pub epsilon: f64,
    /// Relative objective change below which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Residual tolerance handed to the SPD solver.
    pub solver_tol: f64,
    /// Relative stationarity residual a run must reach, once the objective
    /// has settled, to be reported converged. See [`fixed_point_residual`].
    pub fixed_point_tol: f64,
}

impl Default for ShrinkConfig {
    fn default() -> Self {
        ShrinkConfig {
            gamma: 1.0,
            epsilon: 1e-8,
            tol: 1e-6,
            max_iter: 100,
            solver_tol: 1e-10,
            fixed_point_tol: 1e-6,
        }
    }
}

impl ShrinkConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        ShrinkConfig {
            gamma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("gamma", self.gamma)?;
        positive("epsilon", self.epsilon)?;
        positive("tol", self.tol)?;
        positive("solver_tol", self.solver_tol)?;
        positive("fixed_point_tol", self.fixed_point_tol)?;
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Reweighted edge quantities at one iterate.
#[derive(Clone, Debug)]
pub struct EdgeReweight {
    /// Same pattern as `W`.
    pub wtilde: SparseSymMatrix,
    pub dtilde: Vec<f64>,
    /// `D̃ − W̃`.
    pub ltilde: SparseSymMatrix,
}

/// Everything the quadratic surrogate needs at one iterate.
#[derive(Clone, Debug)]
pub struct ReweightState {
    pub row_weights: Vec<f64>,
    pub edges: EdgeReweight,
}

impl ReweightState {
    pub fn at(g: &DenseMatrix, f: &DenseMatrix, w: &AffinityGraph, epsilon: f64) -> Result<Self> {
        let h = g.sub(f)?;
        Ok(ReweightState {
            row_weights: reweight_rows(&h, epsilon),
            edges: reweight_edges(g, w, epsilon)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    /// Exact objective (no smoothing).
    pub objective: f64,
    /// Huber-smoothed objective the iteration actually decreases.
    pub smoothed: f64,
}

#[derive(Clone, Debug)]
pub struct ShrunkPatterns {
    /// `n x c`.
    pub patterns: DenseMatrix,
    /// One point per iterate, starting with the initial `G₀`.
    pub trace: Vec<TracePoint>,
    /// The objective settled within `max_iter` and the final iterate meets
    /// the stationarity bound.
    pub converged: bool,
    /// The relative objective change fell below `tol` (the stopping rule
    /// fired), whether or not the stationarity bound was met.
    pub settled: bool,
    /// `‖(S + γL̃)G − SF‖_F / max(1, ‖SF‖_F)` at the final iterate.
    pub residual: f64,
    /// Number of updates performed.
    pub iterations: usize,
}

impl ShrunkPatterns {
    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.objective)
    }

    pub fn final_smoothed(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.smoothed)
    }
}

/// `r` above `ε`, the matching quadratic below; `ε = 0` gives `r`.
#[inline]
pub fn huber(r: f64, epsilon: f64) -> f64 {
    if r >= epsilon {
        r
    } else {
        r * r / (2.0 * epsilon) + 0.5 * epsilon
    }
}

/// Objective value with each norm passed through [`huber`]. Every undirected
/// edge of `W` contributes once.
pub fn objective(g: &DenseMatrix, f: &DenseMatrix, w: &AffinityGraph, gamma: f64, epsilon: f64) -> Result<f64> {
    if g.shape() != f.shape() {
        return Err(Error::dim(format!("G is {:?} but F is {:?}", g.shape(), f.shape())));
    }
    if w.n() != g.rows() {
        return Err(Error::dim(format!("graph has {} nodes, G has {} rows", w.n(), g.rows())));
    }
    if epsilon < 0.0 {
        return Err(Error::param("epsilon must be nonnegative"));
    }
    let fidelity: f64 = (0..g.rows()).map(|i| huber(distance(g.row(i), f.row(i)), epsilon)).sum();
    let smoothness: f64 = w
        .edges()
        .map(|(i, j, wij)| wij * huber(distance(g.row(i), g.row(j)), epsilon))
        .sum();
    Ok(fidelity + gamma * smoothness)
}

/// `S_ii = 1 / (2 max(‖h_i‖, ε))` over the rows of `H = G − F`.
pub fn reweight_rows(h: &DenseMatrix, epsilon: f64) -> Vec<f64> {
    h.row_iter().map(|r| 0.5 / norm2(r).max(epsilon)).collect()
}

/// `W̃_ij = W_ij / (2 max(‖g_i − g_j‖, ε))` on the pattern of `W`, with its
/// degree vector and Laplacian.
pub fn reweight_edges(g: &DenseMatrix, w: &AffinityGraph, epsilon: f64) -> Result<EdgeReweight> {
    let n = w.n();
    if g.rows() != n {
        return Err(Error::dim(format!("graph has {n} nodes, G has {} rows", g.rows())));
    }
    let edges: Vec<(usize, usize, f64)> = w
        .edges()
        .map(|(i, j, wij)| (i, j, 0.5 * wij / distance(g.row(i), g.row(j)).max(epsilon)))
        .collect();
    let mut dtilde = vec![0.0; n];
    for &(i, j, v) in &edges {
        dtilde[i] += v;
        dtilde[j] += v;
    }
    let ltilde = SparseSymMatrix::from_triplets(
        n,
        dtilde
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, d))
            .chain(edges.iter().map(|&(i, j, v)| (i, j, -v))),
    )?;
    let wtilde = SparseSymMatrix::from_triplets(n, edges)?;
    Ok(EdgeReweight { wtilde, dtilde, ltilde })
}

/// Closed-form minimizer of the quadratic surrogate, `(S + γL̃)⁻¹ S F`.
/// `gamma = 0` is accepted and returns `F` up to solver accuracy.
pub fn ssc_update(
    row_weights: &[f64],
    ltilde: &SparseSymMatrix,
    f: &DenseMatrix,
    gamma: f64,
    solver_tol: f64,
) -> Result<DenseMatrix> {
    if row_weights.len() != f.rows() || ltilde.n() != f.rows() {
        return Err(Error::dim(format!(
            "{} row weights and {}x{} Laplacian for {} rows",
            row_weights.len(),
            ltilde.n(),
            ltilde.n(),
            f.rows()
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::param(format!("gamma must be nonnegative, got {gamma}")));
    }
    if let Some(i) = row_weights.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::param(format!("row weight {i} is not positive")));
    }
    let system = ltilde.shifted_by_diagonal(row_weights, gamma)?;
    let rhs = f.scale_rows(row_weights);
    spd_solve_with(&system, &rhs, solver_tol, |z| Ok(apply_system(row_weights, ltilde, gamma, z)))
}

/// `(S + γL̃) Z` with the Laplacian applied as weighted edge differences,
/// `(L̃Z)_i = Σ_j W̃_ij (z_i − z_j)`. Assembled-matrix products lose the
/// small differences under the large floored weights.
fn apply_system(row_weights: &[f64], ltilde: &SparseSymMatrix, gamma: f64, z: &DenseMatrix) -> DenseMatrix {
    let mut out = z.scale_rows(row_weights);
    let c = z.cols();
    let mut acc = vec![0.0; c];
    for i in 0..z.rows() {
        acc.iter_mut().for_each(|a| *a = 0.0);
        let zi = z.row(i);
        for (j, v) in ltilde.row(i) {
            if j == i {
                continue;
            }
            let wt = -v;
            for ((a, &x), &y) in acc.iter_mut().zip(zi).zip(z.row(j)) {
                *a += wt * (x - y);
            }
        }
        for (o, a) in out.row_mut(i).iter_mut().zip(&acc) {
            *o += gamma * a;
        }
    }
    out
}

/// Stationarity residual `‖(S + γL̃)G − SF‖_F` with `S`, `L̃` evaluated at
/// `G`, returned together with `‖SF‖_F`.
pub fn fixed_point_residual(
    g: &DenseMatrix,
    f: &DenseMatrix,
    w: &AffinityGraph,
    gamma: f64,
    epsilon: f64,
) -> Result<(f64, f64)> {
    let state = ReweightState::at(g, f, w, epsilon)?;
    let sf = f.scale_rows(&state.row_weights);
    let lhs = apply_system(&state.row_weights, &state.edges.ltilde, gamma, g);
    Ok((lhs.sub(&sf)?.frobenius_norm(), sf.frobenius_norm()))
}

/// Iterative reweighting from `G₀ = F`.
pub fn ssc_solve(f: &DenseMatrix, w: &AffinityGraph, cfg: &ShrinkConfig) -> Result<ShrunkPatterns> {
    ssc_solve_from(f, w, f.clone(), cfg)
}

/// Iterative reweighting from an arbitrary start.
pub fn ssc_solve_from(f: &DenseMatrix, w: &AffinityGraph, g0: DenseMatrix, cfg: &ShrinkConfig) -> Result<ShrunkPatterns> {
    cfg.validate()?;
    if g0.shape() != f.shape() {
        return Err(Error::dim(format!("G0 is {:?} but F is {:?}", g0.shape(), f.shape())));
    }
    if w.n() != f.rows() {
        return Err(Error::dim(format!("graph has {} nodes, F has {} rows", w.n(), f.rows())));
    }

    let point = |iteration: usize, g: &DenseMatrix| -> Result<TracePoint> {
        Ok(TracePoint {
            iteration,
            objective: objective(g, f, w, cfg.gamma, 0.0)?,
            smoothed: objective(g, f, w, cfg.gamma, cfg.epsilon)?,
        })
    };

    let mut g = g0;
    let mut trace = vec![point(0, &g)?];
    let mut settled = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let state = ReweightState::at(&g, f, w, cfg.epsilon)?;
        g = ssc_update(&state.row_weights, &state.edges.ltilde, f, cfg.gamma, cfg.solver_tol)?;
        iterations += 1;
        let prev = trace.last().expect("trace starts nonempty").smoothed;
        let cur = point(iterations, &g)?;
        trace.push(cur);
        if (prev - cur.smoothed).abs() / prev.max(1.0) < cfg.tol {
            settled = true;
            break;
        }
    }
    let (res, sf) = fixed_point_residual(&g, f, w, cfg.gamma, cfg.epsilon)?;
    let residual = res / sf.max(1.0);
    Ok(ShrunkPatterns {
        patterns: g,
        trace,
        converged: settled && residual <= cfg.fixed_point_tol,
        settled,
        residual,
        iterations,
    })
}
