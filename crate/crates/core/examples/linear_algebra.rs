//! The sparse eigensolver and SPD solvers on a path-graph Laplacian.

use spectral_shrunk::numerics::eigen::max_residual;
use spectral_shrunk::numerics::{conjugate_gradient, residual_norm, spd_solve, sym_eigs_smallest, DenseMatrix, SparseSymMatrix};

fn main() -> spectral_shrunk::Result<()> {
    let n = 3000;
    let mut trips = Vec::new();
    for i in 0..n {
        let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
        trips.push((i, i, deg));
        if i + 1 < n {
            trips.push((i, i + 1, -1.0));
        }
    }
    let l = SparseSymMatrix::from_triplets(n, trips)?;

    let eig = sym_eigs_smallest(&l, 4, 1e-10)?;
    let exact: Vec<f64> = (0..4).map(|k| 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos()).collect();
    println!("eigenvalues {:?}", eig.eigenvalues);
    println!("exact       {exact:?}");
    println!("max residual {:.2e}", max_residual(&l, &eig));

    let k = l.shifted_by_diagonal(&vec![0.01; n], 1.0)?;
    let b = DenseMatrix::from_fn(n, 2, |i, j| ((i + j) as f64).sin());
    let z = spd_solve(&k, &b, 1e-10)?;
    let cg = conjugate_gradient(&k, &b, 1e-10, 10_000)?;
    println!("spd_solve residual {:.2e}, cg residual {:.2e}", residual_norm(&k, &z, &b), residual_norm(&k, &cg, &b));
    Ok(())
}
