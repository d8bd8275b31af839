//! Symmetric positive definite solves `K Z = B`.

use crate::error::{Error, Result};
use crate::numerics::dense::dot;
use crate::numerics::{DenseMatrix, SparseSymMatrix};

/// Systems up to this order are factored densely (Cholesky); larger ones use
/// Jacobi-preconditioned conjugate gradients column by column.
pub const DENSE_SOLVE_LIMIT: usize = 2048;

const REFINEMENT_STEPS: usize = 6;

/// Solves `K Z = B` with `‖KZ − B‖_F ≤ tol · max(1, ‖B‖_F)`.
///
/// When `tol` lies below what double precision can resolve for this `K`
/// and `Z`, the refined solution is accepted once its residual is within a
/// few roundoff units of `‖ |K||Z| + |B| ‖_F`.
pub fn spd_solve(k: &SparseSymMatrix, b: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    spd_solve_with(k, b, tol, |z| k.mul_dense(z))
}

/// [`spd_solve`] with a caller-supplied product `z ↦ K z`.
///
/// The product drives refinement and the residual check, so an operator
/// that evaluates `K z` with less cancellation than the assembled matrix
/// (e.g. a Laplacian applied as edge differences) lowers the attainable
/// residual on badly scaled systems.
pub fn spd_solve_with(
    k: &SparseSymMatrix,
    b: &DenseMatrix,
    tol: f64,
    apply: impl Fn(&DenseMatrix) -> Result<DenseMatrix>,
) -> Result<DenseMatrix> {
    check(k, b, tol)?;
    if k.n() <= DENSE_SOLVE_LIMIT {
        let factor = CholeskyFactor::new(&k.to_dense())?;
        refine(k, b, tol, |r| Ok(factor.solve(r)), &apply, "Cholesky solve with refinement")
    } else {
        let max_iter = 20 * k.n().max(50);
        // Inner CG solves only need a modest relative accuracy; refinement
        // against `apply` does the rest.
        // Residuals are normalized first so the inner tolerance stays relative.
        let inner = |r: &DenseMatrix| {
            let scale = r.frobenius_norm();
            if scale == 0.0 {
                return Ok(DenseMatrix::zeros(r.rows(), r.cols()));
            }
            Ok(conjugate_gradient(k, &r.scaled(1.0 / scale), 1e-8_f64.max(tol), max_iter)?.scaled(scale))
        };
        refine(k, b, tol, inner, &apply, "conjugate gradients with refinement")
    }
}

fn refine(
    k: &SparseSymMatrix,
    b: &DenseMatrix,
    tol: f64,
    solve: impl Fn(&DenseMatrix) -> Result<DenseMatrix>,
    apply: impl Fn(&DenseMatrix) -> Result<DenseMatrix>,
    what: &'static str,
) -> Result<DenseMatrix> {
    let bound = tol * b.frobenius_norm().max(1.0);
    let mut z = solve(b)?;
    let mut res = b.sub(&apply(&z)?)?;
    let mut res_norm = res.frobenius_norm();
    for _ in 0..REFINEMENT_STEPS {
        if res_norm <= bound {
            return Ok(z);
        }
        let candidate = z.add(&solve(&res)?)?;
        let cand_res = b.sub(&apply(&candidate)?)?;
        let cand_norm = cand_res.frobenius_norm();
        if !(cand_norm < res_norm) {
            break;
        }
        z = candidate;
        res = cand_res;
        res_norm = cand_norm;
    }
    if res_norm <= bound || res_norm <= working_precision_floor(k, &z, b) {
        Ok(z)
    } else {
        Err(Error::Convergence { what, residual: res_norm })
    }
}

/// Residual attainable in double precision, `4u‖ |K||Z| + |B| ‖_F`. A
/// refined solution whose residual stagnates below this has componentwise
/// backward error of a few units of roundoff; no representable `Z` does
/// materially better.
fn working_precision_floor(k: &SparseSymMatrix, z: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..k.n() {
        for c in 0..z.cols() {
            let s: f64 = k.row(i).map(|(j, v)| (v * z[(j, c)]).abs()).sum::<f64>() + b[(i, c)].abs();
            acc += s * s;
        }
    }
    4.0 * f64::EPSILON * acc.sqrt()
}

fn check(k: &SparseSymMatrix, b: &DenseMatrix, tol: f64) -> Result<()> {
    if b.rows() != k.n() {
        return Err(Error::dim(format!(
            "right-hand side has {} rows, system has {}",
            b.rows(),
            k.n()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::param(format!("solver tolerance must be positive, got {tol}")));
    }
    Ok(())
}

pub fn residual_norm(k: &SparseSymMatrix, z: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let kz = k.mul_dense(z).expect("shapes checked by caller");
    kz.sub(b).expect("shapes checked by caller").frobenius_norm()
}

/// Dense Cholesky factorization with iterative refinement against the sparse
/// operator.
pub fn cholesky_solve(k: &SparseSymMatrix, b: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    check(k, b, tol)?;
    let factor = CholeskyFactor::new(&k.to_dense())?;
    refine(k, b, tol, |r| Ok(factor.solve(r)), |z| k.mul_dense(z), "Cholesky solve with refinement")
}

/// Lower-triangular Cholesky factor stored row-major.
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
}

impl CholeskyFactor {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut diag = a[(j, j)];
            {
                let lj = &l[j * n..j * n + j];
                diag -= dot(lj, lj);
            }
            if !(diag > 0.0) {
                return Err(Error::Numerical {
                    index: j,
                    reason: format!("nonpositive pivot {diag:e}"),
                });
            }
            let djj = diag.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let (head, tail) = l.split_at_mut(i * n);
                let lj = &head[j * n..j * n + j];
                let li = &mut tail[..n];
                let s = a[(i, j)] - dot(&li[..j], lj);
                li[j] = s / djj;
            }
        }
        Ok(CholeskyFactor { n, l })
    }

    pub fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n, b.cols());
        let mut y = vec![0.0; n];
        for c in 0..b.cols() {
            for i in 0..n {
                let row = &self.l[i * n..i * n + i];
                y[i] = (b[(i, c)] - dot(row, &y[..i])) / self.l[i * n + i];
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in i + 1..n {
                    s -= self.l[k * n + i] * y[k];
                }
                y[i] = s / self.l[i * n + i];
            }
            for i in 0..n {
                out[(i, c)] = y[i];
            }
        }
        out
    }
}

/// Jacobi-preconditioned conjugate gradients, one right-hand side at a time.
/// The tolerance applies to the whole block as in [`spd_solve`].
pub fn conjugate_gradient(k: &SparseSymMatrix, b: &DenseMatrix, tol: f64, max_iter: usize) -> Result<DenseMatrix> {
    check(k, b, tol)?;
    let n = k.n();
    let diag = k.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Numerical {
            index: i,
            reason: format!("nonpositive diagonal {:e}", diag[i]),
        });
    }
    let cols = b.cols().max(1);
    let bound = tol * b.frobenius_norm().max(1.0);
    // Share the block budget evenly across columns.
    let col_bound = bound / (cols as f64).sqrt();

    let mut out = DenseMatrix::zeros(n, b.cols());
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut zv = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut kp = vec![0.0; n];
    for c in 0..b.cols() {
        let rhs = b.column(c);
        x.iter_mut().for_each(|v| *v = 0.0);
        r.copy_from_slice(&rhs);
        for i in 0..n {
            zv[i] = r[i] / diag[i];
        }
        p.copy_from_slice(&zv);
        let mut rz = dot(&r, &zv);
        let mut rnorm = dot(&r, &r).sqrt();
        let mut it = 0;
        while rnorm > col_bound {
            if it >= max_iter {
                return Err(Error::Convergence {
                    what: "conjugate gradients",
                    residual: rnorm,
                });
            }
            k.matvec(&p, &mut kp);
            let curvature = dot(&p, &kp);
            if !(curvature > 0.0) {
                return Err(Error::Numerical {
                    index: c,
                    reason: format!("nonpositive curvature {curvature:e} at iteration {it}"),
                });
            }
            let alpha = rz / curvature;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * kp[i];
            }
            // Periodic true-residual refresh limits drift on stiff systems.
            if it % 50 == 49 {
                k.matvec(&x, &mut kp);
                for i in 0..n {
                    r[i] = rhs[i] - kp[i];
                }
            }
            for i in 0..n {
                zv[i] = r[i] / diag[i];
            }
            let rz_new = dot(&r, &zv);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = zv[i] + beta * p[i];
            }
            rnorm = dot(&r, &r).sqrt();
            it += 1;
        }
        out.set_column(c, &x);
    }
    Ok(out)
}
