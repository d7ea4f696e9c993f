//! Flat result tables written as CSV with a `#` metadata header.
//!
//! Floats are printed with 17 significant digits so equal results give
//! byte-identical files.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub certified: bool,
}

impl Column {
    pub fn new(name: &str, certified: bool) -> Self {
        Column { name: name.to_string(), certified }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

/// Hex SHA-256 of a config's canonical serialization.
pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl ResultTable {
    pub fn new(columns: Vec<Column>, command: &str, config_hash: &str) -> Self {
        let metadata = vec![
            ("tool".into(), format!("specbound {}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), command.into()),
            ("config_sha256".into(), config_hash.into()),
        ];
        ResultTable { columns, rows: Vec::new(), metadata }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Config(format!("row has {} values, table has {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let flags: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}={}", c.name, if c.certified { "certified" } else { "uncertified" }))
            .collect();
        let _ = writeln!(out, "# columns: {}", flags.join(","));
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        let _ = writeln!(out, "{}", names.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&x| format_float(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Parses a table produced by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut certified = std::collections::HashMap::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines.next().ok_or_else(|| Error::Config("table has no header".into()))?;
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta.split_once(": ").unwrap_or((meta, ""));
                if k == "columns" {
                    for f in v.split(',') {
                        if let Some((n, flag)) = f.split_once('=') {
                            certified.insert(n.to_string(), flag == "certified");
                        }
                    }
                } else {
                    metadata.push((k.to_string(), v.to_string()));
                }
            } else {
                break line;
            }
        };
        let columns: Vec<Column> = header
            .split(',')
            .map(|n| Column { name: n.to_string(), certified: certified.get(n).copied().unwrap_or(false) })
            .collect();
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| Error::Config(format!("bad cell '{c}': {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Config("ragged table".into()));
            }
            rows.push(row);
        }
        Ok(ResultTable { columns, rows, metadata })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = ResultTable::new(vec![Column::new("t", true), Column::new("x", false)], "test", &config_hash("{}"));
        t.push(vec![0.1, 1.0 / 3.0]).unwrap();
        t.push(vec![1e-300, -2.5e17]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let back = ResultTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("").len(), 64);
        assert_eq!(&config_hash("")[..8], "e3b0c442");
    }
}
