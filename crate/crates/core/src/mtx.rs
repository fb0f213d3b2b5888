//! Matrix Market text files.
//!
//! Writes the dense `array` form; reads both `array` and `coordinate`
//! (general or symmetric).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const ARRAY_HEADER: &str = "%%MatrixMarket matrix array real general";

pub fn write_matrix(a: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{ARRAY_HEADER}")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            writeln!(w, "{:.16e}", a[(i, j)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_matrix(&text, path)
}

#[derive(Clone, Copy, PartialEq)]
enum Layout {
    Array,
    Coordinate,
}

/// Parses Matrix Market text; `path` is only used in error messages.
pub fn parse_matrix(text: &str, path: &Path) -> Result<DenseMatrix> {
    let err = |line: usize, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(err(1, format!("not a Matrix Market header: '{header}'")));
    }
    let layout = match fields[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(err(1, format!("unsupported layout '{other}'"))),
    };
    if fields[3] != "real" && fields[3] != "integer" && fields[3] != "double" {
        return Err(err(1, format!("unsupported field '{}'", fields[3])));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or_else(|| err(1, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(size_line, format!("bad size line '{size}': {e}")))?;

    let parse_f = |line: usize, t: &str| -> Result<f64> {
        let v: f64 = t.parse().map_err(|_| err(line, format!("bad number '{t}'")))?;
        if !v.is_finite() {
            return Err(err(line, format!("non-finite entry '{t}'")));
        }
        Ok(v)
    };

    match layout {
        Layout::Array => {
            let [rows, cols] = dims[..] else {
                return Err(err(size_line, format!("array size line needs 2 values, got '{size}'")));
            };
            let mut values = Vec::with_capacity(rows * cols);
            for (line, l) in body {
                for t in l.split_whitespace() {
                    values.push(parse_f(line, t)?);
                }
            }
            let expected = if symmetric { rows * (rows + 1) / 2 } else { rows * cols };
            if values.len() != expected {
                return Err(err(
                    size_line,
                    format!("expected {expected} entries for a {rows}x{cols} array, found {}", values.len()),
                ));
            }
            if symmetric {
                let mut a = DenseMatrix::zeros(rows, cols);
                let mut k = 0;
                for j in 0..cols {
                    for i in j..rows {
                        a[(i, j)] = values[k];
                        a[(j, i)] = values[k];
                        k += 1;
                    }
                }
                Ok(a)
            } else {
                DenseMatrix::from_vec_col_major(rows, cols, &values)
            }
        }
        Layout::Coordinate => {
            let [rows, cols, nnz] = dims[..] else {
                return Err(err(size_line, format!("coordinate size line needs 3 values, got '{size}'")));
            };
            let mut a = DenseMatrix::zeros(rows, cols);
            let mut found = 0;
            for (line, l) in body {
                let t: Vec<&str> = l.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(err(line, format!("expected 'row col value', got '{l}'")));
                }
                let index = |s: &str, bound: usize| -> Result<usize> {
                    match s.parse::<usize>() {
                        Ok(k) if (1..=bound).contains(&k) => Ok(k - 1),
                        _ => Err(err(line, format!("index '{s}' outside 1..={bound}"))),
                    }
                };
                let (i, j) = (index(t[0], rows)?, index(t[1], cols)?);
                let v = parse_f(line, t[2])?;
                a[(i, j)] += v;
                if symmetric && i != j {
                    a[(j, i)] += v;
                }
                found += 1;
            }
            if found != nnz {
                return Err(err(size_line, format!("expected {nnz} entries, found {found}")));
            }
            Ok(a)
        }
    }
}
