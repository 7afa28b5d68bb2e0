//! Result tables and their CSV / JSON serializations.

use std::io::Write;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    /// 17 significant digits for floats, so values round-trip exactly.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v.into())
    }
}

/// Resolved configuration plus one row per result.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// Leading parameter columns, then `term1..term4, F`, an optional
/// `stderr_F`, and finally `n_shots, seed`.
pub fn columns(params: &[&str], with_stderr: bool) -> Vec<String> {
    let mut c: Vec<String> = params.iter().map(|s| s.to_string()).collect();
    c.extend(["term1", "term2", "term3", "term4", "F"].map(String::from));
    if with_stderr {
        c.push("stderr_F".into());
    }
    c.extend(["n_shots", "seed"].map(String::from));
    c
}

impl Report {
    pub fn new(config: Vec<(String, String)>, columns: Vec<String>) -> Self {
        Report {
            config,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// Config as `# key=value` comment lines, then the header and rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.config {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        let mut top = Map::new();
        top.insert("config".into(), Value::Object(config));
        top.insert("results".into(), Value::Array(results));
        serde_json::to_writer_pretty(&mut out, &Value::Object(top))
            .map_err(|e| crate::error::CliError::io(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(
            vec![("command".into(), "discrete".into()), ("c0".into(), "0.6".into())],
            columns(&["c0"], false),
        );
        r.push(vec![
            0.6.into(),
            0.1.into(),
            (-0.2).into(),
            0.3.into(),
            Cell::Missing,
            (1.0 / 3.0).into(),
            0usize.into(),
            7u64.into(),
        ]);
        r
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# command=discrete");
        assert_eq!(lines[2], "c0,term1,term2,term3,term4,F,n_shots,seed");
        assert_eq!(
            lines[3],
            "5.9999999999999998e-1,1.0000000000000001e-1,-2.0000000000000001e-1,\
             2.9999999999999999e-1,,3.3333333333333331e-1,0,7"
        );
    }

    #[test]
    fn csv_and_json_carry_the_same_numbers() {
        let r = sample();
        let mut csv_buf = Vec::new();
        r.write_csv(&mut csv_buf).unwrap();
        let mut json_buf = Vec::new();
        r.write_json(&mut json_buf).unwrap();

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(csv_buf.as_slice());
        let header = reader.headers().unwrap().clone();
        let row = reader.records().next().unwrap().unwrap();
        let json: Value = serde_json::from_slice(&json_buf).unwrap();
        let obj = &json["results"][0];
        for (name, field) in header.iter().zip(row.iter()) {
            match &obj[name] {
                Value::Null => assert_eq!(field, ""),
                v => assert_eq!(field.parse::<f64>().unwrap(), v.as_f64().unwrap(), "{name}"),
            }
        }
        assert_eq!(json["config"]["c0"], "0.6");
    }

    #[test]
    #[should_panic]
    fn ragged_rows_rejected() {
        let mut r = Report::new(Vec::new(), columns(&[], true));
        r.push(vec![Cell::Missing]);
    }
}
