//! k-NN graph, Laplacians and the spectral embedding of two moons.

use spectral_shrunk::cli::synth::two_moons;
use spectral_shrunk::embedding::spectral_embed;
use spectral_shrunk::graph::{auto_affinity, connected_components, laplacians};

fn main() -> spectral_shrunk::Result<()> {
    let ds = two_moons(200, 0.05, 0)?;
    let (graph, bw) = auto_affinity(&ds.x, 5)?;
    println!("n = {}, edges = {}, delta = {:.4}", graph.n(), graph.edges().count(), bw.delta);
    println!("components: {}", connected_components(&graph).0);

    let lset = laplacians(&graph);
    let emb = spectral_embed(&lset, 4, 1e-10)?;
    println!("smallest eigenvalues of L_n: {:?}", emb.eigenvalues);

    let f = emb.vectors;
    for i in [0, 1, 100, 101] {
        println!("row {i:3} (label {}): {:?}", ds.labels.as_ref().unwrap().labels[i], &f.row(i)[..2]);
    }
    Ok(())
}
