//! Result tables and their CSV / JSON renderings.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits: enough to round-trip any f64.
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Missing
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::from)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form remarks (warnings, analytic reference values).
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

/// The JSON document written by the tool: the run configuration plus its table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub config: RunConfig,
    #[serde(flatten)]
    pub table: Table,
}

pub const CONFIG_PREFIX: &str = "# config: ";

pub fn render_csv(config: &RunConfig, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# ulad {} {}\n",
        env!("CARGO_PKG_VERSION"),
        config.command.name()
    ));
    out.push_str(CONFIG_PREFIX);
    out.push_str(&serde_json::to_string(config).expect("config serializes"));
    out.push('\n');
    for note in &table.notes {
        out.push_str(&format!("# note: {note}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let fields: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(config: &RunConfig, table: &Table) -> String {
    let report = Report {
        tool: format!("ulad {}", env!("CARGO_PKG_VERSION")),
        config: config.clone(),
        table: table.clone(),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(Cell::Num(0.1).csv(), "1.0000000000000001e-1");
        assert_eq!(
            Cell::Num(40.52621845).csv().len(),
            "4.0526218450000000e1".len()
        );
        let back: f64 = Cell::Num(std::f64::consts::PI).csv().parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
        assert_eq!(Cell::from(f64::NAN), Cell::Missing);
        assert_eq!(Cell::Missing.csv(), "");
    }
}
