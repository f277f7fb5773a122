//! CSV matrix files.
//!
//! Layout: one row per sensor, one column per position, comma-delimited,
//! UTF-8, LF line endings. An optional first row of position labels is
//! recognized when none of its cells parse as numbers. Values are written
//! with 17 significant digits so that doubles round-trip exactly.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvMatrix {
    pub values: DMatrix<f64>,
    pub header: Option<Vec<String>>,
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok()
}

pub fn read_matrix_csv<R: Read>(reader: R) -> Result<CsvMatrix> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, record) in csv.records().enumerate() {
        let line = index + 1;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if index == 0 && !record.is_empty() && record.iter().all(|c| parse_cell(c).is_none()) {
            header = Some(record.iter().map(|c| c.trim().to_string()).collect());
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            match parse_cell(cell) {
                Some(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("column {}: '{}' is not a finite number", col + 1, cell),
                    })
                }
            }
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }

    if let (Some(h), Some(first)) = (&header, rows.first()) {
        if h.len() != first.len() {
            return Err(Error::Parse {
                line: 1,
                message: format!("header has {} labels for {} columns", h.len(), first.len()),
            });
        }
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "no numeric rows".to_string(),
        });
    }
    let values = DMatrix::from_row_iterator(rows.len(), cols, rows.into_iter().flatten());
    Ok(CsvMatrix { values, header })
}

/// Formats a double with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix_csv<W: Write>(mut writer: W, values: &DMatrix<f64>, header: Option<&[String]>) -> Result<()> {
    if let Some(h) = header {
        writeln!(writer, "{}", h.join(","))?;
    }
    for row in values.row_iter() {
        let cells: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        writeln!(writer, "{}", cells.join(","))?;
    }
    writer.flush()?;
    Ok(())
}
