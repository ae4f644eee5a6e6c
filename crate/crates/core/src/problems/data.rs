//! Plain-text reference data: one vector per line, whitespace-separated
//! decimals. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn read_objective_file<T: Scalar>(path: &Path) -> Result<Vec<Vec<T>>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            message,
        };
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map(T::lit)
                    .map_err(|e| parse_err(format!("`{tok}`: {e}")))
            })
            .collect::<Result<Vec<T>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_err(format!("expected {w} columns, found {}", row.len())))
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_objective_file<T: Scalar>(path: &Path, rows: &[Vec<T>]) -> Result<()> {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{:e}", v.as_f64())).collect();
        writeln!(out, "{}", line.join(" ")).expect("writing to a String");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads an ideal/nadir pair: first data line is the ideal point, second the nadir.
pub fn read_hints<T: Scalar>(path: &Path) -> Result<(Vec<T>, Vec<T>)> {
    let mut rows = read_objective_file(path)?;
    if rows.len() != 2 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 0,
            message: format!("expected 2 rows (ideal, nadir), found {}", rows.len()),
        });
    }
    let nadir = rows.pop().unwrap();
    let ideal = rows.pop().unwrap();
    Ok((ideal, nadir))
}

pub fn write_hints<T: Scalar>(path: &Path, ideal: &[T], nadir: &[T]) -> Result<()> {
    write_objective_file(path, &[ideal.to_vec(), nadir.to_vec()])
}
