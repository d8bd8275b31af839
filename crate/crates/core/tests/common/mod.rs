//! Independent reference implementations used by the integration tests.
//! Everything here is deliberately naive: dense, quadratic or worse, and
//! sharing no code with the library beyond the matrix type.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_shrunk::numerics::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cyclic Jacobi rotations until every off-diagonal entry is negligible.
/// Returns ascending eigenvalues and matching eigenvector columns.
pub fn jacobi_eigen(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(i == j)).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let vals = order.iter().map(|&i| m[i][i]).collect();
    let vecs = DenseMatrix::from_fn(n, n, |r, c| v[r][order[c]]);
    (vals, vecs)
}

/// Gaussian elimination with partial pivoting, column by column.
pub fn gauss_solve(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut out = DenseMatrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = a.row(i).to_vec();
                r.push(b[(i, c)]);
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
            m.swap(col, piv);
            for r in col + 1..n {
                let f = m[r][col] / m[col][col];
                for k in col..=n {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| m[i][k] * out[(k, c)]).sum();
            out[(i, c)] = (m[i][n] - s) / m[i][i];
        }
    }
    out
}

/// Full sort of all other rows by `(squared distance, index)`.
pub fn brute_knn(x: &DenseMatrix, k: usize) -> Vec<Vec<usize>> {
    (0..x.rows())
        .map(|i| {
            let mut all: Vec<(f64, usize)> = (0..x.rows()).filter(|&j| j != i).map(|j| (dist2(x.row(i), x.row(j)), j)).collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            all.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Dense affinity through an explicit neighbour mask.
pub fn dense_affinity(x: &DenseMatrix, k: usize, delta: f64) -> DenseMatrix {
    let n = x.rows();
    let nb = brute_knn(x, k);
    let mut mask = vec![vec![false; n]; n];
    for (i, list) in nb.iter().enumerate() {
        for &j in list {
            mask[i][j] = true;
            mask[j][i] = true;
        }
    }
    DenseMatrix::from_fn(n, n, |i, j| {
        if mask[i][j] {
            (-dist2(x.row(i), x.row(j)) / (delta * delta)).exp().max(f64::MIN_POSITIVE)
        } else {
            0.0
        }
    })
}

pub fn dense_normalized_laplacian(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let d: Vec<f64> = (0..n).map(|i| a.row(i).iter().sum()).collect();
    DenseMatrix::from_fn(n, n, |i, j| {
        let id = f64::from(i == j);
        if d[i] > 0.0 && d[j] > 0.0 {
            id - a[(i, j)] / (d[i] * d[j]).sqrt()
        } else {
            id
        }
    })
}

/// Connected components by repeated relaxation of a label array.
pub fn component_count(a: &DenseMatrix) -> usize {
    let n = a.rows();
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if a[(i, j)] > 0.0 && label[j] < label[i] {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut l = label.clone();
    l.sort();
    l.dedup();
    l.len()
}

/// `Σ_i φ(‖g_i − f_i‖) + γ/2 Σ_{i≠j} W_ij φ(‖g_i − g_j‖)` over ordered pairs of a
/// dense weight matrix.
pub fn naive_objective(g: &DenseMatrix, f: &DenseMatrix, w: &DenseMatrix, gamma: f64, eps: f64) -> f64 {
    let phi = |r: f64| if r >= eps { r } else { r * r / (2.0 * eps) + eps / 2.0 };
    let n = g.rows();
    let mut j = 0.0;
    for i in 0..n {
        j += phi(dist2(g.row(i), f.row(i)).sqrt());
    }
    let mut t = 0.0;
    for i in 0..n {
        for k in 0..n {
            if i != k && w[(i, k)] != 0.0 {
                t += w[(i, k)] * phi(dist2(g.row(i), g.row(k)).sqrt());
            }
        }
    }
    j + gamma * t / 2.0
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Best matched count over all injective relabelings of predicted labels.
pub fn brute_acc(pred: &[usize], truth: &[usize], c: usize) -> f64 {
    let best = permutations(c)
        .into_iter()
        .map(|p| pred.iter().zip(truth).filter(|(a, b)| p[**a] == **b).count())
        .max()
        .unwrap();
    best as f64 / pred.len() as f64
}

/// NMI from empirical joint and marginal probabilities.
pub fn definitional_nmi(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len() as f64;
    let kp = pred.iter().max().unwrap() + 1;
    let kt = truth.iter().max().unwrap() + 1;
    let mut mi = 0.0;
    let p = |l: usize| pred.iter().filter(|&&x| x == l).count() as f64 / n;
    let q = |h: usize| truth.iter().filter(|&&x| x == h).count() as f64 / n;
    for l in 0..kp {
        for h in 0..kt {
            let joint = pred.iter().zip(truth).filter(|(a, b)| **a == l && **b == h).count() as f64 / n;
            if joint > 0.0 {
                mi += joint * (joint / (p(l) * q(h))).ln();
            }
        }
    }
    let ent = |k: usize, f: &dyn Fn(usize) -> f64| -> f64 {
        (0..k).map(f).filter(|&v| v > 0.0).map(|v| -v * v.ln()).sum()
    };
    let hp = ent(kp, &p);
    let hq = ent(kt, &q);
    if hp == 0.0 || hq == 0.0 {
        return if hp == 0.0 && hq == 0.0 { 1.0 } else { 0.0 };
    }
    mi / (hp * hq).sqrt()
}

/// Lloyd step by step: assign (ties to lowest index), record inertia,
/// recompute means. Stops on an unchanged assignment. Assumes no cluster
/// empties out.
pub fn naive_lloyd(x: &DenseMatrix, init: &DenseMatrix, max_iter: usize) -> (Vec<usize>, Vec<f64>) {
    let c = init.rows();
    let mut centers: Vec<Vec<f64>> = (0..c).map(|j| init.row(j).to_vec()).collect();
    let assign = |centers: &Vec<Vec<f64>>| -> Vec<usize> {
        x.row_iter()
            .map(|r| {
                let mut best = 0;
                for j in 1..c {
                    if dist2(r, &centers[j]) < dist2(r, &centers[best]) {
                        best = j;
                    }
                }
                best
            })
            .collect()
    };
    let inertia = |labels: &[usize], centers: &Vec<Vec<f64>>| -> f64 {
        x.row_iter().zip(labels).map(|(r, &l)| dist2(r, &centers[l])).sum()
    };
    let mut labels = assign(&centers);
    let mut trace = vec![inertia(&labels, &centers)];
    for _ in 0..max_iter {
        for (j, center) in centers.iter_mut().enumerate() {
            let members: Vec<&[f64]> = x.row_iter().zip(&labels).filter(|(_, &l)| l == j).map(|(r, _)| r).collect();
            for (d, v) in center.iter_mut().enumerate() {
                *v = members.iter().map(|r| r[d]).sum::<f64>() / members.len() as f64;
            }
        }
        let next = assign(&centers);
        trace.push(inertia(&next, &centers));
        if next == labels {
            break;
        }
        labels = next;
    }
    (labels, trace)
}

/// Nelder–Mead on a flat parameter vector.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, iters: usize) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let centroid: Vec<f64> = (0..d).map(|k| simplex[..d].iter().map(|p| p[k]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|k| centroid[k] + t * (simplex[d][k] - centroid[k])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[d] = xe;
                vals[d] = fe;
            } else {
                simplex[d] = xr;
                vals[d] = fr;
            }
        } else if fr < vals[d - 1] {
            simplex[d] = xr;
            vals[d] = fr;
        } else {
            let xc = along(0.5);
            let fc = f(&xc);
            if fc < vals[d] {
                simplex[d] = xc;
                vals[d] = fc;
            } else {
                for i in 1..=d {
                    simplex[i] = (0..d).map(|k| simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k])).collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=d).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (simplex[best].clone(), vals[best])
}
