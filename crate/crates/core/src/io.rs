//! CSV formats.
//!
//! * Points: one point per line, `d` comma-separated decimal floats, with an
//!   optional header line.
//! * Labels: `index,label` lines with a 0-based point index and a 1-based
//!   class label, preceded by an `index,label` header.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back reproduces the exact values.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    Error::Csv {
        line,
        message: err.to_string(),
    }
}

/// Parses a point cloud; `header` skips the first line.
pub fn read_points<R: Read>(reader: R, header: bool) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Csv {
                        line,
                        message: format!("'{field}' is not a finite number"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv {
            line: 0,
            message: "no points".into(),
        });
    }
    PointCloud::from_rows(&rows)
}

pub fn write_points<W: Write>(mut writer: W, cloud: &PointCloud) -> Result<()> {
    let coords = cloud.coords();
    for i in 0..cloud.len() {
        let line: Vec<String> = coords.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(writer, "{}", line.join(","))?;
    }
    Ok(())
}

/// Writes 0-based labels as 1-based `index,label` rows.
pub fn write_labels<W: Write>(mut writer: W, labels: &[usize]) -> Result<()> {
    writeln!(writer, "index,label")?;
    for (i, l) in labels.iter().enumerate() {
        writeln!(writer, "{i},{}", l + 1)?;
    }
    Ok(())
}

/// Reads an `index,label` file back into 0-based labels ordered by index.
pub fn read_labels<R: Read>(reader: R) -> Result<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut pairs = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Csv { line, message };
        if record.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", record.len())));
        }
        let index: usize = record[0]
            .parse()
            .map_err(|_| bad(format!("bad index '{}'", &record[0])))?;
        let label: usize = record[1]
            .parse()
            .map_err(|_| bad(format!("bad label '{}'", &record[1])))?;
        if label == 0 {
            return Err(bad("labels are 1-based".into()));
        }
        pairs.push((index, label - 1));
    }
    pairs.sort_unstable();
    if pairs.iter().enumerate().any(|(k, &(i, _))| i != k) {
        return Err(Error::Csv {
            line: 0,
            message: "indices must be exactly 0..n".into(),
        });
    }
    Ok(pairs.into_iter().map(|(_, l)| l).collect())
}
