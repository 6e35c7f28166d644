use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
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
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v.unwrap_or(f64::NAN))
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if !v.is_finite() => String::new(),
            Cell::Num(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(v) if !v.is_finite() => "null".into(),
            Cell::Num(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => serde_json::Value::String(s.clone()).to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// A homogeneous result table. Every row ends with a `status` column that is
/// "ok" or the error of the failed cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        let mut columns = columns.to_vec();
        columns.push("status");
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, mut row: Vec<Cell>, status: impl Into<String>) {
        row.push(Cell::Text(status.into()));
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    /// A row whose numeric cells are NaN because the computation failed.
    pub fn push_failed(&mut self, keys: Vec<Cell>, err: impl std::fmt::Display) {
        let mut row = keys;
        while row.len() + 1 < self.columns.len() {
            row.push(Cell::Num(f64::NAN));
        }
        self.push(row, err.to_string());
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.last() == Some(&Cell::Text("ok".into())))
    }

    pub fn emit(&self, format: Format, w: impl Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv))?;
        }
        out.flush()?;
        Ok(())
    }

    fn write_json(&self, mut w: impl Write) -> Result<()> {
        write!(w, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(w, ",")?;
            }
            write!(w, "\n  {{")?;
            for (j, (k, v)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    write!(w, ", ")?;
                }
                write!(w, "\"{k}\": {}", v.json())?;
            }
            write!(w, "}}")?;
        }
        writeln!(w, "{}]", if self.rows.is_empty() { "" } else { "\n" })?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_nan() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["a,b".into(), 0.1.into()], "ok");
        t.push_failed(vec!["x".into()], "moment of order 3 diverges");
        let mut buf = Vec::new();
        t.emit(Format::Csv, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "name,value,status\n\"a,b\",1.0000000000000001e-1,ok\nx,,moment of order 3 diverges\n"
        );
        assert!(!t.all_ok());
    }

    #[test]
    fn json_is_valid_and_ordered() {
        let mut t = Table::new(&["z", "a"]);
        t.push(vec![3usize.into(), f64::NAN.into()], "ok");
        let mut buf = Vec::new();
        t.emit(Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["a"], serde_json::Value::Null);
        let s = String::from_utf8(buf).unwrap();
        assert!(s.find("\"z\"").unwrap() < s.find("\"a\"").unwrap());
    }

    #[test]
    fn empty_and_single_row() {
        let mut t = Table::new(&["n"]);
        let mut buf = Vec::new();
        t.emit(Format::Csv, &mut buf).unwrap();
        assert_eq!(buf, b"n,status\n");
        t.push(vec![1usize.into()], "ok");
        let mut buf = Vec::new();
        t.emit(Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1 + 0.2, 1e-300, -7.25e12, std::f64::consts::PI] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }
}
