//! Clustering accuracy under the best label mapping, and normalized mutual
//! information.

use crate::error::{Error, Result};
use crate::kmeans::KMeansResult;
use crate::numerics::DenseMatrix;

/// Hard labels in `0..c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub c: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, c: usize) -> Result<Self> {
        if let Some(i) = labels.iter().position(|&l| l >= c) {
            return Err(Error::param(format!("label {} at position {i} is not below c = {c}", labels[i])));
        }
        Ok(ClusterAssignment { labels, c })
    }

    /// `c` taken as one past the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let c = labels.iter().max().map_or(0, |m| m + 1);
        ClusterAssignment { labels, c }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl From<&KMeansResult> for ClusterAssignment {
    fn from(r: &KMeansResult) -> Self {
        ClusterAssignment {
            labels: r.labels.clone(),
            c: r.clusters(),
        }
    }
}

/// `counts[l][h]` = number of points predicted `l` with true label `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<usize>>,
}

impl ContingencyTable {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let cols = self.counts.first().map_or(0, Vec::len);
        (0..cols).map(|h| self.counts.iter().map(|r| r[h]).sum()).collect()
    }
}

pub fn contingency(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<ContingencyTable> {
    if pred.len() != truth.len() {
        return Err(Error::dim(format!(
            "{} predicted labels against {} true labels",
            pred.len(),
            truth.len()
        )));
    }
    let mut counts = vec![vec![0usize; truth.c]; pred.c];
    for (&l, &h) in pred.labels.iter().zip(&truth.labels) {
        counts[l][h] += 1;
    }
    Ok(ContingencyTable { counts })
}

/// Optimal assignment for a square cost matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// Row `i` is matched to column `columns[i]`.
    pub columns: Vec<usize>,
    pub cost: f64,
}

/// Minimum-cost perfect matching (Kuhn–Munkres with potentials, `O(n³)`).
pub fn hungarian(cost: &DenseMatrix) -> Result<Assignment> {
    let n = cost.rows();
    if cost.cols() != n {
        return Err(Error::dim(format!("cost matrix is {}x{}, not square", n, cost.cols())));
    }
    if !cost.is_finite() {
        return Err(Error::param("cost matrix has non-finite entries"));
    }
    // 1-based rows and columns; index 0 is the virtual start column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; n];
    for j in 1..=n {
        columns[matched[j] - 1] = j - 1;
    }
    let total = columns.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
    Ok(Assignment { columns, cost: total })
}

/// Fraction of points whose predicted cluster maps to their true class
/// under the best one-to-one mapping.
pub fn acc(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let n = pred.len();
    if n == 0 {
        return Err(Error::dim("cannot score an empty assignment"));
    }
    let size = pred.c.max(truth.c);
    let cost = DenseMatrix::from_fn(size, size, |l, h| {
        if l < pred.c && h < truth.c {
            -(table.counts[l][h] as f64)
        } else {
            0.0
        }
    });
    let matched = -hungarian(&cost)?.cost;
    Ok(matched / n as f64)
}

/// `I(P, Q) / √(H(P) H(Q))` with natural logs. A single-cluster partition
/// scores 1 against another single-cluster partition and 0 otherwise.
pub fn nmi(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let n = pred.len();
    if n == 0 {
        return Err(Error::dim("cannot score an empty assignment"));
    }
    let nf = n as f64;
    let entropy = |sums: &[usize]| -> f64 {
        sums.iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let (rows, cols) = (table.row_sums(), table.col_sums());
    let (hp, hq) = (entropy(&rows), entropy(&cols));
    if hp == 0.0 || hq == 0.0 {
        return Ok(if hp == 0.0 && hq == 0.0 { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for (l, row) in table.counts.iter().enumerate() {
        for (h, &t) in row.iter().enumerate() {
            if t > 0 {
                let t = t as f64;
                mi += t / nf * (nf * t / (rows[l] as f64 * cols[h] as f64)).ln();
            }
        }
    }
    Ok((mi / (hp * hq).sqrt()).clamp(0.0, 1.0))
}
