//! Rendering results as JSON or CSV.

use std::fmt;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// A flat table for CSV output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A result ready to print in either format.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub json: Value,
    pub table: Option<Table>,
}

impl Rendered {
    pub fn json(value: impl Serialize) -> Self {
        Self {
            json: serde_json::to_value(value).expect("results serialize"),
            table: None,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    /// Two-column table from a JSON object of scalars.
    pub fn map_table(self, key: &str, value: &str) -> Self {
        let table = self.json.as_object().map(|m| {
            let mut t = Table::new(&[key, value]);
            for (k, v) in m {
                t.push(vec![k.clone(), scalar(v)]);
            }
            t
        });
        Self { table, ..self }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("this result has no CSV form; use --format json")]
    NoTable,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("CSV output is not UTF-8")]
    Utf8,
}

/// Renders to a string. JSON objects have sorted keys; rationals are `"p/q"`.
pub fn emit(r: &Rendered, format: Format) -> Result<String, EmitError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&r.json)? + "\n"),
        Format::Csv => {
            let table = r.table.as_ref().ok_or(EmitError::NoTable)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| EmitError::Csv(e.into_error().into()))?;
            String::from_utf8(bytes).map_err(|_| EmitError::Utf8)
        }
    }
}
