//! PCA on high-dimensional blobs, then k-means and spectral clustering in
//! the reduced space.

use spectral_shrunk::baselines::{fit_pca_kmeans, fit_pca_spectral, pca, pca_grid};
use spectral_shrunk::cli::synth::blobs;
use spectral_shrunk::metrics::{acc, ClusterAssignment};

fn main() -> spectral_shrunk::Result<()> {
    let ds = blobs(240, 60, 4, 6.0, 11)?;
    let truth = ds.labels.as_ref().unwrap();
    let total = pca(&ds.x, ds.dim())?.captured_variance();

    for m in pca_grid(ds.n(), ds.dim()) {
        let p = pca(&ds.x, m)?;
        let km = ClusterAssignment::from(&fit_pca_kmeans(&ds.x, 4, m, 10, 0)?);
        let sc = ClusterAssignment::from(&fit_pca_spectral(&ds.x, 4, m, 5, 10, 0)?);
        println!(
            "m = {m:3}: variance kept {:.3}, pca-kmeans ACC {:.3}, pca-sc ACC {:.3}",
            p.captured_variance() / total,
            acc(&km, truth)?,
            acc(&sc, truth)?
        );
    }
    Ok(())
}
