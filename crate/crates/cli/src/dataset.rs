//! Dataset and report files.
//!
//! CSV rows carry 17 significant digits (`{:.16e}`), which is enough to
//! reproduce every double exactly on read-back; JSON numbers go through
//! serde_json's shortest-round-trip printer, so both formats are lossless.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::Failure;

fn io_failure(path: &Path, err: std::io::Error) -> Failure {
    Failure::input(format!("cannot write {}: {err}", path.display()))
}

/// Write a numeric table as CSV: one header line, then one row per record.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut w = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        writeln!(w, "{}", columns.join(","))?;
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            let mut first = true;
            for v in row {
                if !first {
                    write!(w, ",")?;
                }
                write!(w, "{v:.16e}")?;
                first = false;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    run().map_err(|e| io_failure(path, e))
}

/// Write the same table as a JSON document `{"columns": [...], "samples": [[...]]}`.
pub fn write_json_table(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
    let value = serde_json::json!({
        "columns": columns,
        "samples": rows,
    });
    write_json(path, &value)
}

/// Pretty-print a JSON document to a file with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::input(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_failure(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
        let mut lines = text.lines();
        let header = lines
            .next()
            .unwrap()
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        (header, rows)
    }

    #[test]
    fn csv_round_trips_doubles_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        // awkward values: subnormal-ish exponents, negative zero, an irrational
        let rows = vec![
            vec![0.1 + 0.2, -0.0, std::f64::consts::PI],
            vec![1.0 / 3.0, 2.0f64.sqrt() * 1e-300, -7.234567890123456e108],
        ];
        write_csv(&path, &["a", "b", "c"], &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let (header, back) = parse_csv(&text);
        assert_eq!(header, ["a", "b", "c"]);
        assert_eq!(back.len(), rows.len());
        for (orig, read) in rows.iter().zip(&back) {
            for (x, y) in orig.iter().zip(read) {
                assert_eq!(x.to_bits(), y.to_bits(), "mismatch: {x:e} vs {y:e}");
            }
        }
        // 17 significant digits = 1 lead + 16 after the point
        let first_cell = text.lines().nth(1).unwrap().split(',').next().unwrap();
        let mantissa = first_cell.split('e').next().unwrap();
        let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 17, "cell {first_cell}");
    }

    #[test]
    fn json_table_round_trips_doubles_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let rows = vec![vec![0.1 + 0.2, 1.0 / 3.0], vec![6.02e23, -1.6e-19]];
        write_json_table(&path, &["x", "y"], &rows).unwrap();
        let value: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(value["columns"][1], "y");
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let y = value["samples"][i][j].as_f64().unwrap();
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
