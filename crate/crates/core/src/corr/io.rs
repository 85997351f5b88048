use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Writes `n=<n>` followed by one comma-separated row per line. Values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_matrix_csv<W: Write>(mut w: W, m: &Matrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    writeln!(w, "n={}", m.rows())?;
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(r: R) -> Result<Matrix> {
    let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty matrix file".into(),
    })?;
    let header = header?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!(
                "expected header `n=<positive int>`, found `{}`",
                header.trim()
            ),
        })?;
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line_no, line) in lines {
        let line = line?;
        if rows == n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than {n} rows"),
            });
        }
        let before = data.len();
        for (col, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("column {}: `{}` is not a number", col + 1, field.trim()),
            })?;
            data.push(v);
        }
        if data.len() - before != n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {n} values, found {}", data.len() - before),
            });
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Parse {
            line: line_no + rows,
            message: format!("expected {n} rows, found {rows}"),
        });
    }
    Matrix::from_row_major(n, n, data)
}
