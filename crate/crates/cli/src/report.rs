use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// A CSV table with a header row.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Collects what one invocation reads and produces.
pub struct Report {
    subcommand: String,
    digest: Sha256,
    parameters: Map<String, Value>,
    warnings: Vec<String>,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(subcommand: &str) -> Self {
        Report {
            subcommand: subcommand.to_string(),
            digest: Sha256::new(),
            parameters: Map::new(),
            warnings: Vec::new(),
            table: None,
        }
    }

    /// Reads an input file and folds it into the digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.digest.update((bytes.len() as u64).to_le_bytes());
        self.digest.update(&bytes);
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(name.to_string(), v);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn finish(self, result: Value, seed: u64) -> Result<(String, Option<Table>)> {
        let envelope = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.subcommand,
            "input_digest": hex::encode(self.digest.finalize()),
            "parameters": Value::Object(self.parameters),
            "result": result,
            "warnings": self.warnings,
            "seed": seed,
        });
        let mut text = serde_json::to_string_pretty(&envelope)?;
        text.push('\n');
        Ok((text, self.table))
    }
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Shortest round-trip form, so tables are byte-stable.
pub fn num(x: f64) -> String {
    format!("{x}")
}
