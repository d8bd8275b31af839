use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spectral_shrunk::cli::{self, Dataset, Format, Method, RunParams, SynthKind, SynthSpec};
use spectral_shrunk::Result;

/// Spectral shrunk clustering and baselines.
#[derive(Parser)]
#[command(name = "ssc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset with one method.
    Cluster {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Method::Ssc)]
        method: Method,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        output: Output,
    },
    /// SSC over a grid of γ values with a fixed seed.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Comma-separated γ grid.
        #[arg(long, value_delimiter = ',', default_values_t = cli::DEFAULT_GAMMAS)]
        gammas: Vec<f64>,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        output: Output,
    },
    /// All methods side by side, each repeated with consecutive seeds.
    Bench {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = Method::ALL)]
        methods: Vec<Method>,
        #[arg(long, value_delimiter = ',', default_values_t = cli::DEFAULT_GAMMAS)]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        output: Output,
    },
    /// Write a labeled synthetic dataset.
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        clusters: usize,
        /// Blob standard deviation or moon noise.
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Matrix CSV to write.
        #[arg(long)]
        out: PathBuf,
        /// Labels file to write.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// Numeric CSV, one sample per row, no header.
    data: PathBuf,
    /// Ground-truth labels, one integer per line.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct Params {
    /// Defaults to the number of label classes.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long)]
    pca_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Output {
    /// Output file; JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Params {
    fn run_params(&self) -> RunParams {
        RunParams {
            clusters: self.clusters,
            k: self.k,
            gamma: self.gamma,
            epsilon: self.epsilon,
            tol: self.tol,
            max_iter: self.max_iter,
            restarts: self.restarts,
            pca_dim: self.pca_dim,
        }
    }
}

fn load(input: &Input) -> Result<Dataset> {
    cli::load_dataset(&input.data, input.labels.as_deref())
}

fn emit(reports: &[cli::RunReport], output: &Output) -> Result<()> {
    match (&output.out, output.format) {
        (Some(path), format) => {
            for p in cli::export_report(reports, path, format)? {
                eprintln!("wrote {}", p.display());
            }
        }
        (None, Format::Json) => println!("{}", cli::reports_json(reports)?),
        (None, Format::Csv) => {
            for r in reports {
                println!("iteration,objective");
                for t in r.trace.iter().flatten() {
                    println!("{},{}", t.iteration, t.objective);
                }
            }
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Cluster { input, method, params, output } => {
            let ds = load(&input)?;
            let report = cli::run_cluster(&ds, method, &params.run_params(), params.seed)?;
            emit(&[report], &output)
        }
        Command::Sweep { input, gammas, params, output } => {
            let ds = load(&input)?;
            let reports = cli::run_sweep(&ds, &params.run_params(), &gammas, params.seed)?;
            emit(&reports, &output)?;
            if output.out.is_some() {
                println!("gamma,acc,nmi");
                for (g, acc, nmi) in cli::sensitivity_table(&reports) {
                    let show = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
                    println!("{g},{},{}", show(acc), show(nmi));
                }
            }
            Ok(())
        }
        Command::Bench { input, methods, gammas, repeats, params, output } => {
            let ds = load(&input)?;
            let rows = cli::run_bench(&ds, &methods, &params.run_params(), &gammas, repeats, params.seed)?;
            match &output.out {
                Some(path) => cli::export_bench(&rows, path, output.format)?,
                None => print!("{}", cli::bench_table(&rows)),
            }
            Ok(())
        }
        Command::Synth { kind, n, dim, clusters, noise, seed, out, labels } => {
            let ds = SynthSpec { kind, n, dim, clusters, noise, seed }.generate()?;
            cli::write_dataset(&ds, &out, labels.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(parsed.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
