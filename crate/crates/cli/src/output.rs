use std::io::Write;

use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};
use settol::ExtendedValue;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,

    /// Show values rounded to N decimals in table and CSV output, prefixed
    /// with `~`. JSON output stays exact.
    #[arg(long, value_name = "N")]
    pub decimal: Option<usize>,

    /// Do not print the banner line on stderr.
    #[arg(long)]
    pub no_banner: bool,

    /// Dump every simplex tableau to stderr.
    #[arg(short, long)]
    pub verbose: bool,
}

/// A cell that holds either plain text or a tolerance value.
#[derive(Clone, Debug)]
pub enum Cell {
    Text(String),
    Value(ExtendedValue),
    Count(usize),
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

impl From<ExtendedValue> for Cell {
    fn from(v: ExtendedValue) -> Self {
        Cell::Value(v)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Count(n)
    }
}

impl Cell {
    fn text(&self, decimal: Option<usize>) -> String {
        match (self, decimal) {
            (Cell::Text(s), _) => s.clone(),
            (Cell::Count(n), _) => n.to_string(),
            (Cell::Value(v @ ExtendedValue::Finite(q)), Some(d)) if !q.is_integer() => {
                format!("~{}", v.to_decimal(d))
            }
            (Cell::Value(v), _) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Count(n) => json!(n),
            Cell::Value(v) => Value::String(v.to_string()),
        }
    }
}

/// Rows plus trailing `key: value` lines.
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<(&'static str, Cell)>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Report {
            columns,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.footer.push((key, value.into()));
    }

    pub fn render(&self, out: &OutputArgs) -> Result<String, Failure> {
        match out.format {
            Format::Table => Ok(self.table(out.decimal)),
            Format::Csv => self.csv(out.decimal),
            Format::Json => Ok(self.json()),
        }
    }

    fn table(&self, decimal: Option<usize>) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.text(decimal)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([self.columns[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: Vec<&str>| {
            let padded: Vec<String> = fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut s = if cells.is_empty() {
            String::new()
        } else {
            line(self.columns.clone())
        };
        for r in &cells {
            s += &line(r.iter().map(String::as_str).collect());
        }
        s + &self.footer_lines(decimal)
    }

    fn footer_lines(&self, decimal: Option<usize>) -> String {
        self.footer
            .iter()
            .map(|(k, v)| format!("{k}: {}\n", v.text(decimal)))
            .collect()
    }

    fn csv(&self, decimal: Option<usize>) -> Result<String, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>, rec: Vec<String>| {
            w.write_record(rec).map_err(|e| Failure::io(e.to_string()))
        };
        write(&mut w, self.columns.iter().map(|c| c.to_string()).collect())?;
        for r in &self.rows {
            write(&mut w, r.iter().map(|c| c.text(decimal)).collect())?;
        }
        let mut bytes = w.into_inner().map_err(|e| Failure::io(e.to_string()))?;
        bytes
            .write_all(self.footer_lines(decimal).as_bytes())
            .expect("in-memory write");
        Ok(String::from_utf8(bytes).expect("utf-8 input"))
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.footer {
            top.insert(k.to_string(), v.json());
        }
        serde_json::to_string_pretty(&Value::Object(top)).expect("plain data serializes") + "\n"
    }
}
