//! Check rows, tables and their text/CSV renderings.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

/// One verified quantity.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub inputs: String,
    pub residual: f64,
    pub threshold: f64,
    pub status: Status,
}

impl CheckRow {
    /// A row that passes iff `residual <= threshold`.
    pub fn bounded(name: impl Into<String>, inputs: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            inputs: inputs.into(),
            residual,
            threshold,
            status: Status::from_bool(residual <= threshold),
        }
    }

    /// A yes/no row; residual is 0 on success and 1 on failure.
    pub fn flag(name: impl Into<String>, inputs: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            inputs: inputs.into(),
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            status: Status::from_bool(ok),
        }
    }

    /// A failure carrying a diagnostic instead of a residual.
    pub fn error(name: impl Into<String>, diagnostic: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            inputs: diagnostic.to_string(),
            residual: f64::NAN,
            threshold: 0.0,
            status: Status::Fail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// A named CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| crate::Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Formats a float so that identical values always give identical text.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub notes: Vec<String>,
    pub rows: Vec<CheckRow>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Report) {
        self.notes.extend(other.notes);
        self.rows.extend(other.rows);
        self.tables.extend(other.tables);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    pub fn status(&self) -> Status {
        Status::from_bool(self.passed())
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Check rows as a table with columns `check,inputs,residual,threshold,status`.
    pub fn rows_table(&self) -> Table {
        let mut t = Table::new("checks", &["check", "inputs", "residual", "threshold", "status"]);
        for r in &self.rows {
            t.push(vec![
                r.name.clone(),
                r.inputs.clone(),
                num(r.residual),
                num(r.threshold),
                r.status.as_str().into(),
            ]);
        }
        t
    }

    /// Plain-text summary; the last line is `PASS` or `FAIL`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.title);
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        for r in &self.rows {
            let _ = writeln!(
                s,
                "[{}] {} ({}) residual={} threshold={}",
                r.status.as_str(),
                r.name,
                r.inputs,
                num(r.residual),
                num(r.threshold)
            );
        }
        for t in &self.tables {
            let _ = writeln!(s, "table {}: {} rows", t.name, t.rows.len());
        }
        let failed = self.rows.iter().filter(|r| !r.passed()).count();
        let _ = writeln!(s, "{} checks, {} failed", self.rows.len(), failed);
        let _ = writeln!(s, "{}", self.status().as_str());
        s
    }
}
