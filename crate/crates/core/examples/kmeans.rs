use spectral_shrunk::cli::synth::blobs;
use spectral_shrunk::kmeans::{kmeans_best_of, kmeanspp_init, lloyd, LLOYD_MAX_ITER, LLOYD_TOL};

fn main() -> spectral_shrunk::Result<()> {
    let ds = blobs(400, 2, 5, 2.5, 7)?;

    for seed in 0..5 {
        let init = kmeanspp_init(&ds.x, 5, seed)?;
        let run = lloyd(&ds.x, &init, LLOYD_MAX_ITER, LLOYD_TOL)?;
        println!("seed {seed}: inertia {:.3} after {} iterations", run.inertia, run.iterations);
    }

    let best = kmeans_best_of(&ds.x, 5, 50, 0)?;
    let mut sizes = vec![0; best.clusters()];
    for &l in &best.labels {
        sizes[l] += 1;
    }
    println!("best of 50: inertia {:.3}, cluster sizes {sizes:?}", best.inertia);
    Ok(())
}
