//! Deterministic text output: number formatting, CSV tables and JSON
//! records.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Twelve significant digits in scientific notation. Negative zero prints
/// as zero so reruns stay byte-identical.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

/// A CSV table with a fixed header. Cells are written verbatim, so string
/// cells must not contain commas or newlines.
#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv())
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(format!("cannot encode JSON: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(-50.3), "-5.03000000000e1");
        assert_eq!(fmt_num(-0.0), fmt_num(0.0));
        assert_eq!(fmt_num(1.0 / 3.0), "3.33333333333e-1");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), fmt_num(2.0)]);
        assert_eq!(t.to_csv(), "a,b\n1,2.00000000000e0\n");
    }
}
