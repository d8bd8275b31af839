use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Symmetric sparse matrix.
///
/// Built from coordinate triplets with `i <= j` (lower-triangle triplets are
/// mirrored on input). Internally both halves are kept in CSR form with
/// column indices sorted per row, so row access and products are direct.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut upper: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::dim(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            if !v.is_finite() {
                return Err(Error::Data(format!("non-finite value at ({i}, {j})")));
            }
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            upper.push((a, b, v));
        }
        upper.sort_unstable_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = upper.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Data(format!(
                "duplicate coordinate ({}, {})",
                w[0].0, w[0].1
            )));
        }

        let mut counts = vec![0usize; n];
        for &(i, j, _) in &upper {
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        let mut indptr = vec![0usize; n + 1];
        for i in 0..n {
            indptr[i + 1] = indptr[i] + counts[i];
        }
        let nnz = indptr[n];
        let mut indices = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        let mut next = indptr.clone();
        // Sorted upper triplets give increasing columns in every row: the
        // mirrored (j, i) entries arrive in increasing i, and for row i all
        // mirrored entries (column < i) precede the upper ones (column >= i).
        for &(i, j, v) in &upper {
            if i != j {
                indices[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        for &(i, j, v) in &upper {
            indices[next[i]] = j;
            values[next[i]] = v;
            next[i] += 1;
        }
        Ok(SparseSymMatrix {
            n,
            indptr,
            indices,
            values,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Symmetric part of a dense matrix, keeping entries with `|v| > drop_tol`.
    /// The upper triangle is read; the input is assumed symmetric.
    pub fn from_dense_upper(m: &DenseMatrix, drop_tol: f64) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::dim("matrix is not square"));
        }
        let n = m.rows();
        let mut trips = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = m[(i, j)];
                if v.abs() > drop_tol {
                    trips.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, trips)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries counting both halves.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `i` as `(column, value)`, columns ascending.
    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[s..e]
            .iter()
            .copied()
            .zip(self.values[s..e].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    /// Upper-triangle triplets `(i, j, v)` with `i <= j`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[s..e].binary_search(&j) {
            Ok(p) => self.values[s + p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Row sums.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `self · B` for a dense `B` with `n` rows.
    pub fn mul_dense(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.rows() != self.n {
            return Err(Error::dim(format!(
                "{}x{} sparse times {}x{} dense",
                self.n,
                self.n,
                b.rows(),
                b.cols()
            )));
        }
        let mut out = DenseMatrix::zeros(self.n, b.cols());
        for i in 0..self.n {
            let orow = out.row_mut(i);
            for (j, v) in self.row(i) {
                for (o, &bv) in orow.iter_mut().zip(b.row(j)) {
                    *o += v * bv;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `diag(d) + alpha · self`, keeping this matrix's sparsity pattern plus the diagonal.
    pub fn shifted_by_diagonal(&self, d: &[f64], alpha: f64) -> Result<Self> {
        if d.len() != self.n {
            return Err(Error::dim(format!(
                "diagonal of length {} for an {}x{} matrix",
                d.len(),
                self.n,
                self.n
            )));
        }
        let mut trips: Vec<(usize, usize, f64)> = self.triplets().map(|(i, j, v)| (i, j, alpha * v)).collect();
        let mut has_diag = vec![false; self.n];
        for t in trips.iter_mut() {
            if t.0 == t.1 {
                t.2 += d[t.0];
                has_diag[t.0] = true;
            }
        }
        for (i, &present) in has_diag.iter().enumerate() {
            if !present {
                trips.push((i, i, d[i]));
            }
        }
        Self::from_triplets(self.n, trips)
    }
}
