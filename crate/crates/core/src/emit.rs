//! CSV and JSON writers shared by the table and sweep generators.
//!
//! Floats are written in shortest round-trip form so repeated runs produce
//! byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Serializes `rows` as CSV with a header taken from the field names.
pub fn write_csv<W: Write, R: Serialize>(w: W, rows: &[R]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn write_csv_file<R: Serialize>(path: impl AsRef<Path>, rows: &[R]) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    write_csv(f, rows)
}

pub fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json_file<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    std::fs::write(path, json_string(value)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        x: f64,
        y: Option<f64>,
    }

    #[test]
    fn csv_header_and_missing_values() {
        let rows = [
            Row {
                name: "a",
                x: 0.1,
                y: None,
            },
            Row {
                name: "b",
                x: 2.5e-15,
                y: Some(3.0),
            },
        ];
        let s = csv_string(&rows).unwrap();
        assert_eq!(s, "name,x,y\na,0.1,\nb,2.5e-15,3.0\n");
    }

    #[test]
    fn file_output_matches_string() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let rows = [Row {
            name: "a",
            x: 1.0 / 3.0,
            y: Some(1e300),
        }];
        write_csv_file(&p, &rows).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), csv_string(&rows).unwrap());
    }
}
