use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use warpgeo::{Error, Result};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Column-named rows; every command emits exactly one.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Rejects the table if any numeric cell is NaN or infinite.
    pub fn check_finite(&self) -> Result<()> {
        for row in &self.rows {
            for (name, cell) in self.columns.iter().zip(row) {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(Error::NonFinite(format!("output column '{name}'")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, format: Format, meta: Value) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(meta),
        }
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) => write!(out, "{v:e}").unwrap(),
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                    Cell::Text(s) => out.push_str(s),
                    Cell::Bool(b) => write!(out, "{b}").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }

    fn json(&self, meta: Value) -> String {
        let mut columns = Map::new();
        for (k, name) in self.columns.iter().enumerate() {
            let values = self
                .rows
                .iter()
                .map(|row| match &row[k] {
                    Cell::Num(v) => json!(v),
                    Cell::Int(v) => json!(v),
                    Cell::Text(s) => json!(s),
                    Cell::Bool(b) => json!(b),
                })
                .collect();
            columns.insert(name.clone(), Value::Array(values));
        }
        let mut out = serde_json::to_string_pretty(&json!({"meta": meta, "columns": columns})).unwrap();
        out.push('\n');
        out
    }
}
