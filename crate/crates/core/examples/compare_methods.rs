//! Every clustering method on three synthetic datasets.

use spectral_shrunk::cli::synth::{blobs, components, two_moons};
use spectral_shrunk::cli::{run_cluster, Method, RunParams};

fn main() -> spectral_shrunk::Result<()> {
    let datasets = [
        ("blobs", blobs(300, 10, 3, 3.0, 4)?),
        ("moons", two_moons(200, 0.08, 1)?),
        ("components", components(90, 3, 3, 2)?),
    ];
    let params = RunParams { restarts: 20, ..RunParams::default() };

    println!("{:<12}{:<12}{:>8}{:>8}", "dataset", "method", "ACC", "NMI");
    for (name, ds) in &datasets {
        for method in Method::ALL {
            let r = run_cluster(ds, method, &params, 0)?;
            println!("{name:<12}{:<12}{:>8.3}{:>8.3}", method.name(), r.acc.unwrap(), r.nmi.unwrap());
        }
    }
    Ok(())
}
