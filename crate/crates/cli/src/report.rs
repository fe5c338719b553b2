//! Report values and their json, csv and text renderings.

use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Rows for tabular renderings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    /// Preferred tabular form; object reports fall back to key/value rows.
    pub table: Option<Table>,
}

impl Output {
    pub fn json(json: Value) -> Self {
        Self { json, table: None }
    }
}

/// Scalars as plain text, composites as compact JSON.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn key_value_table(v: &Value) -> Table {
    let mut t = Table::new(&["key", "value"]);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                t.rows.push(vec![k.clone(), cell(x)]);
            }
        }
        other => t.rows.push(vec!["value".into(), cell(other)]),
    }
    t
}

pub fn csv_string(t: &Table) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 cells"))
}

fn text_string(t: &Table) -> String {
    let widths: Vec<usize> = (0..t.header.len())
        .map(|c| {
            std::iter::once(&t.header)
                .chain(&t.rows)
                .map(|r| r.get(c).map_or(0, |x| x.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |r: &[String]| {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(x, &w)| format!("{x:<w$}"))
            .collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&t.header);
    for r in &t.rows {
        out += &line(r);
    }
    out
}

pub fn render(out: &Output, format: Format) -> Result<String, CliError> {
    let table = || out.table.clone().unwrap_or_else(|| key_value_table(&out.json));
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&out.json)? + "\n",
        Format::Csv => csv_string(&table())?,
        Format::Text => text_string(&table()),
    })
}
