//! Batch front end: datasets, synthetic data, experiment runs and report
//! export. The `ssc` binary is a thin argument parser over this module.

mod data;
mod report;
mod run;
pub mod synth;

pub use data::{load_dataset, parse_labels, parse_matrix, write_dataset, Dataset};
pub use report::{bench_table, export_bench, export_report, parse_reports, reports_json, Format};
pub use run::{
    mean_std, run_bench, run_cluster, run_sweep, sensitivity_table, BenchRow, Method, RunParams, RunReport,
    DEFAULT_GAMMAS,
};
pub use synth::{SynthKind, SynthSpec};
