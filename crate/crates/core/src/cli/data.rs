use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::ClusterAssignment;
use crate::numerics::DenseMatrix;

/// Samples as rows, with optional ground-truth labels.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub x: DenseMatrix,
    pub labels: Option<ClusterAssignment>,
    pub name: String,
}

impl Dataset {
    pub fn new(x: DenseMatrix, labels: Option<ClusterAssignment>, name: impl Into<String>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != x.rows() {
                return Err(Error::Data(format!("{} labels for {} samples", l.len(), x.rows())));
            }
        }
        Ok(Dataset {
            x,
            labels,
            name: name.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }
}

/// Reads a headerless numeric CSV (one sample per row) and, optionally, a
/// labels file with one integer per line. Distinct label values are mapped
/// to `0..c` in increasing order.
pub fn load_dataset(matrix_path: &Path, labels_path: Option<&Path>) -> Result<Dataset> {
    let x = parse_matrix(open(matrix_path)?, matrix_path)?;
    let labels = match labels_path {
        Some(p) => Some(parse_labels(open(p)?, p)?),
        None => None,
    };
    let name = matrix_path
        .file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    Dataset::new(x, labels, name)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

pub fn parse_matrix<R: Read>(input: R, path: &Path) -> Result<DenseMatrix> {
    let parse_err = |line: usize, column: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader(input).records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, 0, e.to_string())
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(parse_err(line, record.len().min(c) + 1, format!("expected {c} fields, found {}", record.len())));
            }
            _ => {}
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, j + 1, format!("not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line, j + 1, format!("non-finite value {field:?}")));
            }
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.filter(|_| rows > 0).ok_or_else(|| Error::Data(format!("{} holds no samples", path.display())))?;
    DenseMatrix::from_row_major(rows, cols, data)
}

pub fn parse_labels<R: Read>(input: R, path: &Path) -> Result<ClusterAssignment> {
    let mut raw = Vec::new();
    for (idx, record) in reader(input).records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(idx + 1, |p| p.line() as usize),
            column: 0,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                column: 2,
                message: format!("expected one label, found {} fields", record.len()),
            });
        }
        let v: i64 = record[0].parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line,
            column: 1,
            message: format!("not an integer label: {:?}", &record[0]),
        })?;
        raw.push(v);
    }
    let mut codes = BTreeMap::new();
    for &v in &raw {
        codes.entry(v).or_insert(0usize);
    }
    for (i, code) in codes.values_mut().enumerate() {
        *code = i;
    }
    let labels = raw.iter().map(|v| codes[v]).collect();
    ClusterAssignment::new(labels, codes.len())
}

/// Writes the matrix as CSV and, when present and requested, the labels one
/// per line.
pub fn write_dataset(ds: &Dataset, matrix_path: &Path, labels_path: Option<&Path>) -> Result<()> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    let mut out = String::new();
    for row in ds.x.row_iter() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_file(matrix_path, out.as_bytes()).map_err(io_err(matrix_path))?;
    if let (Some(path), Some(labels)) = (labels_path, &ds.labels) {
        let body: String = labels.labels.iter().map(|l| format!("{l}\n")).collect();
        write_file(path, body.as_bytes()).map_err(io_err(path))?;
    }
    Ok(())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    File::create(path)?.write_all(bytes)
}

pub(crate) fn io_error(path: PathBuf) -> impl FnOnce(std::io::Error) -> Error {
    move |source| Error::Io { path, source }
}
