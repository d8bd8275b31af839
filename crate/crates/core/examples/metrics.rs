//! Clustering accuracy, NMI and the assignment solver behind ACC.

use spectral_shrunk::metrics::{acc, contingency, hungarian, nmi, ClusterAssignment};
use spectral_shrunk::numerics::DenseMatrix;

fn main() -> spectral_shrunk::Result<()> {
    let truth = ClusterAssignment::from_labels(vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
    // Same partition with renamed clusters, then one point moved.
    let renamed = ClusterAssignment::from_labels(vec![2, 2, 2, 0, 0, 0, 1, 1, 1]);
    let noisy = ClusterAssignment::from_labels(vec![2, 2, 0, 0, 0, 0, 1, 1, 1]);

    println!("renamed: ACC {:.3} NMI {:.3}", acc(&renamed, &truth)?, nmi(&renamed, &truth)?);
    println!("noisy:   ACC {:.3} NMI {:.3}", acc(&noisy, &truth)?, nmi(&noisy, &truth)?);
    println!("contingency: {:?}", contingency(&noisy, &truth)?.counts);

    let cost = DenseMatrix::from_rows(&[[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])?;
    let a = hungarian(&cost)?;
    println!("assignment {:?}, cost {}", a.columns, a.cost);
    Ok(())
}
