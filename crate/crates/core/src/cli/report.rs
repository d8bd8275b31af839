use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::data::{io_error, write_file};
use super::run::{BenchRow, RunReport};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Array of report objects.
    Json,
    /// One `iteration,objective` trace file per report.
    Csv,
}

/// Writes `reports` to `out` and returns the files written.
///
/// CSV writes one trace per report that has one; with more than one report
/// the files are named `<stem>_<index>.<ext>`.
pub fn export_report(reports: &[RunReport], out: &Path, format: Format) -> Result<Vec<PathBuf>> {
    match format {
        Format::Json => {
            write_file(out, reports_json(reports)?.as_bytes()).map_err(io_error(out.to_path_buf()))?;
            Ok(vec![out.to_path_buf()])
        }
        Format::Csv => {
            let mut written = Vec::new();
            for (idx, report) in reports.iter().enumerate() {
                let Some(trace) = &report.trace else { continue };
                let path = if reports.len() == 1 { out.to_path_buf() } else { indexed(out, idx) };
                let mut body = String::from("iteration,objective\n");
                for t in trace {
                    body.push_str(&format!("{},{}\n", t.iteration, t.objective));
                }
                write_file(&path, body.as_bytes()).map_err(io_error(path.clone()))?;
                written.push(path);
            }
            Ok(written)
        }
    }
}

pub fn reports_json(reports: &[RunReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Data(format!("serializing reports: {e}")))
}

pub fn parse_reports(json: &str) -> Result<Vec<RunReport>> {
    serde_json::from_str(json).map_err(|e| Error::Data(format!("parsing reports: {e}")))
}

/// Bench rows as JSON, or as a CSV summary table.
pub fn export_bench(rows: &[BenchRow], out: &Path, format: Format) -> Result<()> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(rows).map_err(|e| Error::Data(format!("serializing bench: {e}")))?,
        Format::Csv => bench_table(rows),
    };
    write_file(out, body.as_bytes()).map_err(io_error(out.to_path_buf()))
}

/// `method,pca_dim,gamma,repeats,acc_mean,acc_std,nmi_mean,nmi_std,inertia_mean`.
pub fn bench_table(rows: &[BenchRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    let mut out = String::from("method,pca_dim,gamma,repeats,acc_mean,acc_std,nmi_mean,nmi_std,inertia_mean\n");
    for r in rows {
        let gamma = if r.method == super::Method::Ssc { r.params.gamma.to_string() } else { String::new() };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.params.pca_dim.map_or_else(String::new, |m| m.to_string()),
            gamma,
            r.runs.len(),
            opt(r.acc_mean),
            opt(r.acc_std),
            opt(r.nmi_mean),
            opt(r.nmi_std),
            r.inertia_mean
        ));
    }
    out
}

fn indexed(out: &Path, idx: usize) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "trace".into(), |s| s.to_string_lossy().into_owned());
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{idx}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{idx}"),
    };
    out.with_file_name(name)
}
