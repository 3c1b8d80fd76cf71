//! Tabular scenario output: CSV with fixed precision, or an aligned table.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// One cell of a report row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Flag(bool),
    /// No value (the row carries a nonzero error code).
    Missing,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Flag(b) => if *b { "1" } else { "0" }.to_string(),
            Cell::Missing => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            Cell::Flag(b) => Some(if *b { 1.0 } else { 0.0 }),
            Cell::Missing => None,
        }
    }
}

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Rows sharing one header.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Report { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Values of one column, `None` for missing cells.
    pub fn values(&self, name: &str) -> Vec<Option<f64>> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r[i].as_f64()).collect(),
            None => Vec::new(),
        }
    }

    /// Rows with a nonzero `error_code`.
    pub fn failed_rows(&self) -> usize {
        self.values("error_code").iter().filter(|v| v.is_some_and(|c| c != 0.0)).count()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let fail = |e: csv::Error| LabError::Io { path: "<csv>".into(), message: e.to_string() };
        w.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io { path: "<csv>".into(), message: e.to_string() })?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }

    pub fn to_pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, items: &[&str]| {
            let parts: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &self.columns.iter().map(String::as_str).collect::<Vec<_>>());
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule.iter().map(String::as_str).collect::<Vec<_>>());
        for r in &cells {
            line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Pretty,
}

/// Render the report and write it to `path`, or return the text when no
/// path is given.
pub fn write_report(report: &Report, format: ReportFormat, path: Option<&Path>) -> Result<String> {
    let text = match format {
        ReportFormat::Csv => report.to_csv()?,
        ReportFormat::Pretty => report.to_pretty(),
    };
    if let Some(p) = path {
        std::fs::write(p, &text).map_err(|e| LabError::Io { path: p.to_path_buf(), message: e.to_string() })?;
    }
    Ok(text)
}
