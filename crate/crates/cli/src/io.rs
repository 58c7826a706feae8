//! Delimited numeric text: one observation per line, an optional header
//! line, blank lines and `#` comments skipped.

use std::fs;
use std::io::Write;
use std::path::Path;

use cptest::{LabeledDataset, SampleMatrix};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Auto,
    Char(char),
    Whitespace,
}

impl Delimiter {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "auto" => Delimiter::Auto,
            "comma" | "," => Delimiter::Char(','),
            "tab" | "\\t" | "\t" => Delimiter::Char('\t'),
            "semicolon" | ";" => Delimiter::Char(';'),
            "whitespace" | "space" | " " => Delimiter::Whitespace,
            other => {
                return Err(CliError::input(format!(
                    "unknown delimiter {other:?}; expected auto, comma, tab, semicolon or whitespace"
                )))
            }
        })
    }

    fn resolve(self, first_line: &str) -> Delimiter {
        match self {
            Delimiter::Auto if first_line.contains(',') => Delimiter::Char(','),
            Delimiter::Auto if first_line.contains('\t') => Delimiter::Char('\t'),
            Delimiter::Auto if first_line.contains(';') => Delimiter::Char(';'),
            Delimiter::Auto => Delimiter::Whitespace,
            other => other,
        }
    }

    fn split(self, line: &str) -> Vec<&str> {
        match self {
            Delimiter::Char(c) => line.split(c).map(str::trim).collect(),
            _ => line.split_whitespace().collect(),
        }
    }
}

/// A parsed table: optional header plus numeric rows of equal width.
#[derive(Debug)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub matrix: SampleMatrix,
}

pub fn read_table(path: &Path, delimiter: Delimiter) -> Result<Table, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .peekable();
    let Some(&(_, first)) = lines.peek() else {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    };
    let delimiter = delimiter.resolve(first);
    let mut header = None;
    let mut width = None;
    let mut data = Vec::new();
    let mut rows = 0;
    for (index, line) in lines {
        let fields = delimiter.split(line);
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if rows == 0 && header.is_none() => {
                header = Some(fields.iter().map(|f| f.to_string()).collect::<Vec<_>>());
                width = Some(fields.len());
                continue;
            }
            Err(_) => {
                return Err(CliError::input(format!(
                    "{}:{}: non-numeric field in {line:?}",
                    path.display(),
                    index + 1
                )))
            }
        };
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(CliError::input(format!(
                "{}:{}: field {} is not finite",
                path.display(),
                index + 1,
                bad + 1
            )));
        }
        match width {
            Some(w) if w != values.len() => {
                return Err(CliError::input(format!(
                    "{}:{}: {} fields where earlier lines have {w}",
                    path.display(),
                    index + 1,
                    values.len()
                )))
            }
            _ => width = Some(values.len()),
        }
        data.extend(values);
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    let cols = width.unwrap_or(0);
    let matrix = SampleMatrix::new(rows, cols, data)?;
    Ok(Table { header, matrix })
}

/// Two files with one sample each; the first is labeled 1.
pub fn read_two_samples(path1: &Path, path0: &Path, delimiter: Delimiter) -> Result<LabeledDataset, CliError> {
    let a = read_table(path1, delimiter)?.matrix;
    let b = read_table(path0, delimiter)?.matrix;
    if a.cols() != b.cols() {
        return Err(CliError::input(format!(
            "column counts differ: {} has {} columns, {} has {}",
            path1.display(),
            a.cols(),
            path0.display(),
            b.cols()
        )));
    }
    Ok(LabeledDataset::from_samples(&a, &b)?)
}

/// One file with a 0/1 label column chosen by header name or 0-based index.
pub fn read_labeled(path: &Path, label: &str, delimiter: Delimiter) -> Result<LabeledDataset, CliError> {
    let table = read_table(path, delimiter)?;
    let cols = table.matrix.cols();
    let by_name = table
        .header
        .as_ref()
        .and_then(|h| h.iter().position(|name| name == label));
    let column = match by_name {
        Some(c) => c,
        None => label
            .parse::<usize>()
            .ok()
            .filter(|&c| c < cols)
            .ok_or_else(|| CliError::input(format!("{}: no label column {label:?}", path.display())))?,
    };
    if cols < 2 {
        return Err(CliError::input(format!(
            "{}: needs a feature column besides the label",
            path.display()
        )));
    }
    let mut labels = Vec::with_capacity(table.matrix.rows());
    let mut features = Vec::with_capacity(table.matrix.rows() * (cols - 1));
    for (i, row) in table.matrix.iter_rows().enumerate() {
        labels.push(match row[column] {
            1.0 => 1,
            0.0 => 0,
            v => {
                return Err(CliError::input(format!(
                    "{}: row {} has label {v}; labels must be 0 or 1",
                    path.display(),
                    i + 1
                )))
            }
        });
        features.extend(row.iter().enumerate().filter(|&(j, _)| j != column).map(|(_, v)| *v));
    }
    let matrix = SampleMatrix::new(labels.len(), cols - 1, features)?;
    Ok(LabeledDataset::new(matrix, labels)?)
}

/// Comma-separated rows, shortest round-trip formatting.
pub fn write_matrix(path: &Path, matrix: &SampleMatrix) -> Result<(), CliError> {
    let mut out = String::with_capacity(matrix.rows() * matrix.cols() * 20);
    for row in matrix.iter_rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut file = fs::File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
