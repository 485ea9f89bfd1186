//! Tables, summaries and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::ScenarioConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
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

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

/// Column headers carry their SI unit, e.g. `frequency_Hz`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
                w.write_record(&self.columns).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
                Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
            }
            Format::Json => Ok(serde_json::to_string_pretty(&json!({
                "columns": self.columns,
                "rows": self.rows,
            }))
            .expect("table serializes")
                + "\n"),
        }
    }
}

/// Named scalar results of a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Summary {
    pub entries: Vec<SummaryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryEntry {
    pub quantity: String,
    pub value: Cell,
    pub unit: String,
}

impl Summary {
    pub fn add(&mut self, quantity: &str, value: impl Into<Cell>, unit: &str) {
        self.entries.push(SummaryEntry {
            quantity: quantity.to_string(),
            value: value.into(),
            unit: unit.to_string(),
        });
    }

    pub fn get(&self, quantity: &str) -> Option<&Cell> {
        self.entries
            .iter()
            .find(|e| e.quantity == quantity)
            .map(|e| &e.value)
    }

    pub fn value(&self, quantity: &str) -> Option<f64> {
        self.get(quantity).and_then(Cell::as_f64)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new("summary", &["quantity", "value", "unit"]);
        for e in &self.entries {
            t.push(vec![
                e.quantity.as_str().into(),
                e.value.clone(),
                e.unit.as_str().into(),
            ]);
        }
        t
    }
}

/// Everything one verb produced.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub summary: Summary,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Resolved config plus a `[provenance]` table. Loading the manifest as a
/// config reproduces the run; the provenance table is ignored on input.
pub fn manifest(config: &ScenarioConfig, verb: &str, description: &str) -> String {
    let mut table: toml::Table =
        toml::from_str(&config.to_toml()).expect("config round-trips through TOML");
    table.remove("output_dir");
    let mut provenance = toml::Table::new();
    provenance.insert(
        "tool".into(),
        format!("optoforce {}", env!("CARGO_PKG_VERSION")).into(),
    );
    provenance.insert("verb".into(), verb.into());
    provenance.insert("scenario".into(), config.scenario.name().into());
    provenance.insert("description".into(), description.into());
    provenance.insert("seed".into(), toml::Value::Integer(config.seed as i64));
    table.insert("provenance".into(), toml::Value::Table(provenance));
    toml::to_string(&table).expect("manifest serializes")
}

/// Write tables, the summary and the manifest into `dir`; returns the paths.
pub fn write_run(
    dir: &Path,
    output: &RunOutput,
    format: Format,
    manifest_text: &str,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<(), CliError> {
        let path = dir.join(name);
        fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    for t in &output.tables {
        put(
            format!("{}.{}", t.name, format.extension()),
            t.render(format)?,
        )?;
    }
    put(
        format!("summary.{}", format.extension()),
        output.summary.table().render(format)?,
    )?;
    put("manifest.toml".into(), manifest_text.to_string())?;
    Ok(written)
}
