//! Table rendering to CSV or JSON with a self-describing header.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// Seventeen significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::Number(Number::from_str(&num(*x)).expect("finite number")),
            Cell::Num(_) => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Metadata written ahead of the data: generator, command, optional
/// timestamp, the full configuration and free-form notes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Header {
    pub command: String,
    pub timestamp: Option<u64>,
    pub config: Vec<String>,
    pub notes: Vec<String>,
}

impl Header {
    fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("generator=supercavity {}", crate::VERSION),
            format!("command={}", self.command),
        ];
        if let Some(t) = self.timestamp {
            out.push(format!("generated_unix={t}"));
        }
        out.extend(self.config.iter().cloned());
        out.extend(self.notes.iter().map(|n| format!("note: {n}")));
        out
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert(
            "generator".into(),
            Value::String(format!("supercavity {}", crate::VERSION)),
        );
        m.insert("command".into(), Value::String(self.command.clone()));
        if let Some(t) = self.timestamp {
            m.insert("generated_unix".into(), Value::from(t));
        }
        let config: Map<String, Value> = self
            .config
            .iter()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
            .collect();
        m.insert("config".into(), Value::Object(config));
        m.insert(
            "notes".into(),
            Value::Array(self.notes.iter().cloned().map(Value::String).collect()),
        );
        Value::Object(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// `#`-prefixed header lines, the column row, then data, LF-terminated.
    pub fn to_csv(&self, header: &Header) -> String {
        let mut out = String::new();
        for line in header.lines() {
            out.push_str("# ");
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"header": {...}, "rows": [{column: value, ...}, ...]}`.
    pub fn to_json(&self, header: &Header) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("header".into(), header.json());
        doc.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serialisable");
        text.push('\n');
        text
    }

    pub fn render(&self, header: &Header, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(header),
            Format::Json => self.to_json(header),
        }
    }
}
