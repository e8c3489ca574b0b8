use std::io::{self, Write};

use crate::output::format_row;

/// Column-labelled numeric table with `#`-prefixed metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Header row plus data rows, without metadata.
    pub fn data_section(&self) -> String {
        let mut out = Vec::new();
        self.write_data(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("ascii output")
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        self.write_data(out)
    }

    fn write_data<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", format_row(row))?;
        }
        Ok(())
    }

    /// First non-finite entry as `(row, column)`.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.rows.iter().enumerate().find_map(|(i, r)| {
            r.iter().position(|v| !v.is_finite()).map(|j| (i, j))
        })
    }
}
