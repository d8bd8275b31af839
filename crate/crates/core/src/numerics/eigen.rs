//! Smallest eigenpairs of symmetric matrices.
//!
//! Small problems go through a dense Householder tridiagonalization followed
//! by implicit QL; large sparse problems use a thick-restart Lanczos with full
//! reorthogonalization. Both routes finish with the same sign normalization:
//! the entry of largest magnitude in every eigenvector is nonnegative (ties
//! go to the lowest index).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::dense::{dot, norm2};
use crate::numerics::{DenseMatrix, SparseSymMatrix};

/// Matrices up to this order are decomposed densely.
pub const DENSE_EIGEN_LIMIT: usize = 2048;

const LANCZOS_MAX_RESTARTS: usize = 2000;

#[derive(Clone, Debug)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `n x m`, column `j` paired with `eigenvalues[j]`.
    pub eigenvectors: DenseMatrix,
}

/// The `m` algebraically smallest eigenpairs of `matrix`, each with residual
/// `‖Mv − λv‖ ≤ tol · max(1, ‖M‖∞)`.
pub fn sym_eigs_smallest(matrix: &SparseSymMatrix, m: usize, tol: f64) -> Result<EigenResult> {
    check_request(matrix.n(), m, tol)?;
    if matrix.n() <= DENSE_EIGEN_LIMIT {
        let dense = matrix.to_dense();
        let full = dense_symmetric_eigen(&dense)?;
        let result = truncate(full, m);
        verify_residuals(matrix, &result, tol)?;
        Ok(result)
    } else {
        lanczos_smallest(matrix, m, tol)
    }
}

/// Full eigendecomposition of a dense symmetric matrix, eigenvalues ascending,
/// eigenvectors sign-normalized.
pub fn dense_symmetric_eigen(a: &DenseMatrix) -> Result<EigenResult> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::dim(format!("{}x{} matrix is not square", a.rows(), a.cols())));
    }
    if n == 0 {
        return Ok(EigenResult {
            eigenvalues: vec![],
            eigenvectors: DenseMatrix::zeros(0, 0),
        });
    }
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (a[(i, j)] + a[(j, i)])).collect())
        .collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    // tql2 rotates pairs of columns; work on the transpose so those are rows.
    let mut q: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect();
    drop(v);
    tql2(&mut q, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &q[k]);
    }
    normalize_signs(&mut vectors);
    Ok(EigenResult {
        eigenvalues,
        eigenvectors: vectors,
    })
}

fn check_request(n: usize, m: usize, tol: f64) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::dim(format!("requested {m} eigenpairs of an {n}x{n} matrix")));
    }
    if !(tol > 0.0) {
        return Err(Error::param(format!("eigen tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn truncate(full: EigenResult, m: usize) -> EigenResult {
    let n = full.eigenvectors.rows();
    let vectors = DenseMatrix::from_fn(n, m, |i, j| full.eigenvectors[(i, j)]);
    EigenResult {
        eigenvalues: full.eigenvalues[..m].to_vec(),
        eigenvectors: vectors,
    }
}

fn verify_residuals(matrix: &SparseSymMatrix, result: &EigenResult, tol: f64) -> Result<()> {
    let bound = tol * matrix.norm_inf().max(1.0);
    let worst = max_residual(matrix, result);
    if worst > bound {
        return Err(Error::Convergence {
            what: "symmetric eigensolver",
            residual: worst,
        });
    }
    Ok(())
}

/// Largest `‖Mv − λv‖₂` over the returned pairs.
pub fn max_residual(matrix: &SparseSymMatrix, result: &EigenResult) -> f64 {
    let n = matrix.n();
    let mut mv = vec![0.0; n];
    let mut worst: f64 = 0.0;
    for (j, &lambda) in result.eigenvalues.iter().enumerate() {
        let v = result.eigenvectors.column(j);
        matrix.matvec(&v, &mut mv);
        let r: f64 = mv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Flips each column so that its largest-magnitude entry is nonnegative.
pub fn normalize_signs(vectors: &mut DenseMatrix) {
    for j in 0..vectors.cols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..vectors.rows() {
            let a = vectors[(i, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if vectors.rows() > 0 && vectors[(best, j)] < 0.0 {
            for i in 0..vectors.rows() {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
}

/// Householder reduction to tridiagonal form. On return `v` holds the
/// orthogonal transform, `d` the diagonal and `e[1..]` the subdiagonal.
fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1]);

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`. `q[k]` is the `k`-th column of
/// the accumulated transform (stored as a row).
fn tql2(q: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Convergence {
                        what: "tridiagonal QL",
                        residual: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = q.split_at_mut(i + 1);
                    let qi = &mut lo[i];
                    let qi1 = &mut hi[0];
                    for (a, b) in qi.iter_mut().zip(qi1.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Thick-restart Lanczos with full reorthogonalization for the `m` smallest
/// eigenpairs. Usable at any size; [`sym_eigs_smallest`] routes here above
/// [`DENSE_EIGEN_LIMIT`].
pub fn lanczos_smallest(matrix: &SparseSymMatrix, m: usize, tol: f64) -> Result<EigenResult> {
    let n = matrix.n();
    check_request(n, m, tol)?;
    let basis_cap = n.min((2 * m + 20).max(m + 40));
    let keep = (m + (basis_cap - m) / 2).min(basis_cap - 1).max(m);
    let bound = tol * matrix.norm_inf().max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2c);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(basis_cap);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(basis_cap);

    let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let s = norm2(&start);
    start.iter_mut().for_each(|x| *x /= s);
    let mut next = Some(start);
    let mut worst = f64::INFINITY;

    for _ in 0..LANCZOS_MAX_RESTARTS {
        // Expand the basis up to capacity.
        while basis.len() < basis_cap {
            let mut cand = match next.take() {
                Some(v) => v,
                None => images.last().cloned().expect("basis is nonempty after the first vector"),
            };
            let scale = norm2(&cand).max(f64::MIN_POSITIVE);
            let mut residual_norm = orthogonalize(&mut cand, &basis);
            if residual_norm <= 1e-10 * scale {
                // Invariant subspace found; continue with a fresh random direction.
                let mut retries = 0;
                loop {
                    cand = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
                    residual_norm = orthogonalize(&mut cand, &basis);
                    if residual_norm > 1e-8 || retries > 10 {
                        break;
                    }
                    retries += 1;
                }
                if residual_norm <= 1e-8 {
                    break;
                }
            }
            cand.iter_mut().for_each(|x| *x /= residual_norm);
            let mut image = vec![0.0; n];
            matrix.matvec(&cand, &mut image);
            basis.push(cand);
            images.push(image);
        }

        // Rayleigh-Ritz on the current basis.
        let k = basis.len();
        let mut t = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                t[(i, j)] = v;
                t[(j, i)] = v;
            }
        }
        let ritz = dense_symmetric_eigen(&t)?;
        let wanted = m.min(k);
        let retain = keep.min(k);

        let mut new_basis = Vec::with_capacity(basis_cap);
        let mut new_images = Vec::with_capacity(basis_cap);
        let mut residuals = Vec::with_capacity(retain);
        for col in 0..retain {
            let y = ritz.eigenvectors.column(col);
            let mut x = vec![0.0; n];
            let mut ax = vec![0.0; n];
            for (idx, &coef) in y.iter().enumerate() {
                if coef == 0.0 {
                    continue;
                }
                for (xi, bi) in x.iter_mut().zip(&basis[idx]) {
                    *xi += coef * bi;
                }
                for (ai, bi) in ax.iter_mut().zip(&images[idx]) {
                    *ai += coef * bi;
                }
            }
            let theta = ritz.eigenvalues[col];
            let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
            residuals.push(r);
            new_basis.push(x);
            new_images.push(ax);
        }
        worst = residuals[..wanted].iter().map(|r| norm2(r)).fold(0.0, f64::max);
        if worst <= bound || k == n {
            let mut vectors = DenseMatrix::zeros(n, wanted);
            for (j, x) in new_basis.iter().take(wanted).enumerate() {
                vectors.set_column(j, x);
            }
            normalize_signs(&mut vectors);
            let result = EigenResult {
                eigenvalues: ritz.eigenvalues[..wanted].to_vec(),
                eigenvectors: vectors,
            };
            if k == n {
                // Whole space spanned: the Ritz pairs are exact up to rounding.
                verify_residuals(matrix, &result, tol)?;
            }
            return Ok(result);
        }
        // Restart from the retained Ritz vectors; the shared Lanczos residual
        // direction is recovered from the first unconverged wanted pair.
        let pick = residuals[..wanted]
            .iter()
            .position(|r| norm2(r) > bound)
            .unwrap_or(0);
        next = Some(residuals.swap_remove(pick));
        basis = new_basis;
        images = new_images;
    }
    Err(Error::Convergence {
        what: "Lanczos eigensolver",
        residual: worst,
    })
}

/// Two passes of classical Gram-Schmidt; returns the remaining norm.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
    }
    norm2(v)
}
