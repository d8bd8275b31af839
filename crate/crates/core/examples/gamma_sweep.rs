use spectral_shrunk::cli::synth::two_moons;
use spectral_shrunk::cli::{run_sweep, sensitivity_table, RunParams, DEFAULT_GAMMAS};

fn main() -> spectral_shrunk::Result<()> {
    let ds = two_moons(300, 0.15, 2)?;
    let params = RunParams { restarts: 20, ..RunParams::default() };
    let reports = run_sweep(&ds, &params, &DEFAULT_GAMMAS, 0)?;

    println!("{:>10}{:>8}{:>8}{:>7}", "gamma", "ACC", "NMI", "iters");
    for (r, (gamma, acc, nmi)) in reports.iter().zip(sensitivity_table(&reports)) {
        println!("{gamma:>10.0e}{:>8.3}{:>8.3}{:>7}", acc.unwrap(), nmi.unwrap(), r.iterations);
    }
    Ok(())
}
