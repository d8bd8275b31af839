//! Writes a synthetic dataset to CSV, loads it back, clusters it and exports
//! the reports the same way the `ssc` binary does.

use std::path::Path;

use spectral_shrunk::cli::synth::{SynthKind, SynthSpec};
use spectral_shrunk::cli::{export_report, load_dataset, run_cluster, write_dataset, Format, Method, RunParams};

fn main() -> spectral_shrunk::Result<()> {
    let dir = std::env::temp_dir().join("ssc-example");
    std::fs::create_dir_all(&dir).map_err(|e| spectral_shrunk::Error::Io { path: dir.clone(), source: e })?;
    let (x, y) = (dir.join("moons.csv"), dir.join("moons.labels"));

    let synth = SynthSpec { kind: SynthKind::Moons, n: 150, dim: 2, clusters: 2, noise: 0.06, seed: 5 };
    write_dataset(&synth.generate()?, &x, Some(&y))?;

    let ds = load_dataset(&x, Some(&y))?;
    println!("loaded {} with {} rows", ds.name, ds.n());
    let params = RunParams { restarts: 10, ..RunParams::default() };
    let reports = vec![run_cluster(&ds, Method::Sc, &params, 0)?, run_cluster(&ds, Method::Ssc, &params, 0)?];

    export_report(&reports, &dir.join("reports.json"), Format::Json)?;
    let traces = export_report(&reports[1..], &dir.join("trace.csv"), Format::Csv)?;
    for p in [dir.join("reports.json")].iter().chain(&traces) {
        println!("wrote {}", p.display());
    }
    print_head(&traces[0]);
    Ok(())
}

fn print_head(path: &Path) {
    let body = std::fs::read_to_string(path).unwrap_or_default();
    for line in body.lines().take(4) {
        println!("  {line}");
    }
}
